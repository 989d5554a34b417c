#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "offlist/patch.hpp"

namespace offlist {

struct SimilarityConfig {
  // Weight of the message component; the diff component gets the rest.
  double message_weight = 0.4;
  // Pairs join the threshold subgraph only when sim > threshold.
  double threshold = 0.8;
};

// Throws ConfigError unless message_weight is in [0,1] and threshold in (0,1).
void validate(const SimilarityConfig& config);

struct SimilarityScore {
  double value = 0.0;
  double message_component = 0.0;
  double diff_component = 0.0;
};

// Token-level edit distance (unit cost insert/delete/substitute).
template <class T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  // Common prefix and suffix never contribute.
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a = a.subspan(1);
    b = b.subspan(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a = a.first(a.size() - 1);
    b = b.first(b.size() - 1);
  }
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();

  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitute = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitute});
      diagonal = above;
    }
  }
  return row[b.size()];
}

// 1 - lev(a,b) / max(|a|,|b|); two empty sequences score 1.
double sequence_similarity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

double sim_message(const TokenSeq& a, const TokenSeq& b);

// Sum of line similarities of a greedy best-first pairing between two line
// lists. Identical lines are paired first; the remaining pairs are taken in
// order of decreasing similarity. The lists are put in a canonical order
// before pairing, so the result is exactly symmetric.
double match_lines(std::span<const TokenSeq> a, std::span<const TokenSeq> b);

// Per file, added lines are paired with added lines and removed with removed.
// The score is sum(matched similarity) / sum(max line count), where files
// touched by only one side add their lines to the denominator only, and a file
// touched by both sides without payload (binary, mode change) counts as one
// matched unit. Zero when there is nothing to compare.
double sim_diff(const CanonicalDiff& a, const CanonicalDiff& b);

// True iff the two patches modify at least one common file.
bool prefilter(const CanonicalDiff& a, const CanonicalDiff& b);
bool prefilter(const Patch& a, const Patch& b);

SimilarityScore sim(const Patch& a, const Patch& b, const SimilarityConfig& config);

}  // namespace offlist
