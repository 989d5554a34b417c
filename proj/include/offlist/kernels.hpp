#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "offlist/similarity.hpp"

namespace offlist {

// (i, j) with i < j, indices into a patch universe.
using IndexPair = std::pair<std::size_t, std::size_t>;

// OpenMP kernels. Output order and values do not depend on the thread count.
namespace kernels {

// Pairs sharing at least one affected file, via an inverted file index.
// Sorted and unique.
std::vector<IndexPair> candidate_pairs(std::span<const Patch> universe);

std::vector<SimilarityScore> score_pairs(std::span<const Patch> universe,
                                         std::span<const IndexPair> pairs,
                                         const SimilarityConfig& config);

}  // namespace kernels

// Serial reference versions of the kernels above, used as test oracles and
// as the benchmark baseline.
namespace reference {

// Evaluates the prefilter on every unordered pair.
std::vector<IndexPair> candidate_pairs(std::span<const Patch> universe);

std::vector<SimilarityScore> score_pairs(std::span<const Patch> universe,
                                         std::span<const IndexPair> pairs,
                                         const SimilarityConfig& config);

}  // namespace reference

// Threads used by the kernels; 0 leaves the OpenMP default.
void set_kernel_threads(int threads);
int kernel_threads();

}  // namespace offlist
