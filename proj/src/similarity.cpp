#include "offlist/similarity.hpp"

#include <fmt/format.h>

#include <cstdint>
#include <numeric>

#include "offlist/error.hpp"

namespace offlist {

void validate(const SimilarityConfig& config) {
  if (!(config.message_weight >= 0.0 && config.message_weight <= 1.0)) {
    throw ConfigError(fmt::format("similarity.message_weight must be in [0,1], got {}",
                                  config.message_weight));
  }
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw ConfigError(
        fmt::format("similarity.threshold must be in (0,1), got {}", config.threshold));
  }
}

double sequence_similarity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  const std::size_t distance = levenshtein(a, b);
  return 1.0 - static_cast<double>(distance) / static_cast<double>(longest);
}

double sim_message(const TokenSeq& a, const TokenSeq& b) {
  return sequence_similarity(a.ids(), b.ids());
}

namespace {

struct Candidate {
  double score;
  std::uint32_t i;
  std::uint32_t j;
};

std::vector<std::uint32_t> sorted_by_content(std::span<const TokenSeq> lines) {
  std::vector<std::uint32_t> idx(lines.size());
  std::iota(idx.begin(), idx.end(), 0U);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return lines[x] < lines[y]; });
  return idx;
}

}  // namespace

double match_lines(std::span<const TokenSeq> a, std::span<const TokenSeq> b) {
  if (a.empty() || b.empty()) return 0.0;
  if (std::lexicographical_compare_three_way(b.begin(), b.end(), a.begin(), a.end()) < 0) {
    std::swap(a, b);
  }

  std::vector<bool> used_a(a.size(), false);
  std::vector<bool> used_b(b.size(), false);

  // Identical lines first. Which copy of a duplicated line gets paired does not
  // change the result.
  std::size_t exact = 0;
  {
    const auto sa = sorted_by_content(a);
    const auto sb = sorted_by_content(b);
    std::size_t x = 0;
    std::size_t y = 0;
    while (x < sa.size() && y < sb.size()) {
      const auto c = a[sa[x]] <=> b[sb[y]];
      if (c < 0) {
        ++x;
      } else if (c > 0) {
        ++y;
      } else {
        used_a[sa[x++]] = true;
        used_b[sb[y++]] = true;
        ++exact;
      }
    }
  }
  if (exact == a.size() || exact == b.size()) return static_cast<double>(exact);

  // TODO: bound the quadratic pairing for very large files (band-limited
  // matching around the line position); whole-file rewrites dominate runtime.
  std::vector<Candidate> candidates;
  for (std::uint32_t i = 0; i < a.size(); ++i) {
    if (used_a[i]) continue;
    for (std::uint32_t j = 0; j < b.size(); ++j) {
      if (used_b[j]) continue;
      const double s = sequence_similarity(a[i].ids(), b[j].ids());
      if (s > 0.0) candidates.push_back({s, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });

  double total = 0.0;
  for (const auto& c : candidates) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = true;
    used_b[c.j] = true;
    total += c.score;
  }
  return static_cast<double>(exact) + total;
}

double sim_diff(const CanonicalDiff& a, const CanonicalDiff& b) {
  double matched = 0.0;
  double units = 0.0;
  auto ia = a.files.begin();
  auto ib = b.files.begin();
  while (ia != a.files.end() || ib != b.files.end()) {
    if (ib == b.files.end() || (ia != a.files.end() && ia->first < ib->first)) {
      units += static_cast<double>(ia->second.line_count());
      ++ia;
    } else if (ia == a.files.end() || ib->first < ia->first) {
      units += static_cast<double>(ib->second.line_count());
      ++ib;
    } else {
      const FileChange& fa = ia->second;
      const FileChange& fb = ib->second;
      if (fa.line_count() == 0 && fb.line_count() == 0) {
        matched += 1.0;
        units += 1.0;
      } else {
        matched += match_lines(fa.added, fb.added) + match_lines(fa.removed, fb.removed);
        units += static_cast<double>(std::max(fa.added.size(), fb.added.size()) +
                                     std::max(fa.removed.size(), fb.removed.size()));
      }
      ++ia;
      ++ib;
    }
  }
  if (units == 0.0) return 0.0;
  return std::min(1.0, matched / units);
}

bool prefilter(const CanonicalDiff& a, const CanonicalDiff& b) {
  auto ia = a.files.begin();
  auto ib = b.files.begin();
  while (ia != a.files.end() && ib != b.files.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

bool prefilter(const Patch& a, const Patch& b) { return prefilter(a.diff, b.diff); }

SimilarityScore sim(const Patch& a, const Patch& b, const SimilarityConfig& config) {
  SimilarityScore s;
  s.message_component = sim_message(a.message, b.message);
  s.diff_component = sim_diff(a.diff, b.diff);
  // Written as an offset from the diff component so that (1, 1) yields
  // exactly 1 for any weight.
  s.value = s.diff_component + config.message_weight * (s.message_component - s.diff_component);
  s.value = std::clamp(s.value, 0.0, 1.0);
  return s;
}

}  // namespace offlist
