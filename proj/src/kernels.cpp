#include "offlist/kernels.hpp"

#include <algorithm>
#include <map>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace offlist {

void set_kernel_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace kernels {

std::vector<IndexPair> candidate_pairs(std::span<const Patch> universe) {
  std::map<std::string_view, std::vector<std::size_t>> by_file;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    for (const auto& [path, change] : universe[i].diff.files) by_file[path].push_back(i);
  }
  // Index lists per file, in vertex order, for lookup by position.
  std::vector<const std::vector<std::size_t>*> postings;
  std::vector<std::vector<std::size_t>> files_of(universe.size());
  for (const auto& [path, members] : by_file) {
    const std::size_t f = postings.size();
    postings.push_back(&members);
    for (std::size_t i : members) files_of[i].push_back(f);
  }

  const auto n = static_cast<std::ptrdiff_t>(universe.size());
  std::vector<std::vector<std::size_t>> partners(universe.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& out = partners[static_cast<std::size_t>(i)];
    for (std::size_t f : files_of[static_cast<std::size_t>(i)]) {
      const auto& members = *postings[f];
      auto it = std::upper_bound(members.begin(), members.end(), static_cast<std::size_t>(i));
      out.insert(out.end(), it, members.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  std::vector<IndexPair> pairs;
  std::size_t total = 0;
  for (const auto& p : partners) total += p.size();
  pairs.reserve(total);
  for (std::size_t i = 0; i < partners.size(); ++i) {
    for (std::size_t j : partners[i]) pairs.emplace_back(i, j);
  }
  return pairs;
}

std::vector<SimilarityScore> score_pairs(std::span<const Patch> universe,
                                         std::span<const IndexPair> pairs,
                                         const SimilarityConfig& config) {
  std::vector<SimilarityScore> scores(pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto& [i, j] = pairs[static_cast<std::size_t>(k)];
    scores[static_cast<std::size_t>(k)] = sim(universe[i], universe[j], config);
  }
  return scores;
}

}  // namespace kernels

namespace reference {

std::vector<IndexPair> candidate_pairs(std::span<const Patch> universe) {
  std::vector<IndexPair> pairs;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    for (std::size_t j = i + 1; j < universe.size(); ++j) {
      if (prefilter(universe[i], universe[j])) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

std::vector<SimilarityScore> score_pairs(std::span<const Patch> universe,
                                         std::span<const IndexPair> pairs,
                                         const SimilarityConfig& config) {
  std::vector<SimilarityScore> scores;
  scores.reserve(pairs.size());
  for (const auto& [i, j] : pairs) scores.push_back(sim(universe[i], universe[j], config));
  return scores;
}

}  // namespace reference

}  // namespace offlist
