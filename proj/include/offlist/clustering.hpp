#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "offlist/kernels.hpp"
#include "offlist/patch.hpp"
#include "offlist/score_cache.hpp"
#include "offlist/similarity.hpp"

namespace offlist {

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n = 0);

  std::size_t add();
  std::size_t find(std::size_t x);
  // Returns false if x and y were already connected.
  bool unite(std::size_t x, std::size_t y);
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

enum class Execution { serial, parallel };

// Extra predicate applied after the common-file prefilter.
using PairFilter = std::function<bool(const Patch&, const Patch&)>;

struct GraphOptions {
  Execution execution = Execution::parallel;
  ScoreCache* cache = nullptr;
  PairFilter extra_filter;
};

struct WeightedEdge {
  std::size_t a = 0;  // a < b, vertex indices
  std::size_t b = 0;
  SimilarityScore score;
};

// Weighted graph over the universe. `edges` holds every evaluated pair (all
// pairs that passed the prefilter), sorted by (a, b).
struct SimilarityGraph {
  std::vector<PatchId> vertices;
  std::vector<WeightedEdge> edges;
  double threshold = 0.8;

  std::vector<WeightedEdge> threshold_edges() const;
};

struct Cluster {
  PatchId id;                    // smallest member
  std::vector<PatchId> members;  // sorted
};

SimilarityGraph build_similarity_graph(std::span<const Patch> universe,
                                       const SimilarityConfig& config,
                                       const GraphOptions& options = {});

// Reachability classes of the subgraph with edges of weight > threshold.
// Sorted by cluster id; isolated vertices are singletons.
std::vector<Cluster> connected_components(const SimilarityGraph& graph);
std::vector<Cluster> connected_components(const SimilarityGraph& graph, double threshold);

}  // namespace offlist
