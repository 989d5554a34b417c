#include "offlist/clustering.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace offlist {

DisjointSet::DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSet::add() {
  parent_.push_back(parent_.size());
  rank_.push_back(0);
  return parent_.size() - 1;
}

std::size_t DisjointSet::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSet::unite(std::size_t x, std::size_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (rank_[x] < rank_[y]) std::swap(x, y);
  parent_[y] = x;
  if (rank_[x] == rank_[y]) ++rank_[x];
  return true;
}

std::vector<WeightedEdge> SimilarityGraph::threshold_edges() const {
  std::vector<WeightedEdge> out;
  std::copy_if(edges.begin(), edges.end(), std::back_inserter(out),
               [&](const WeightedEdge& e) { return e.score.value > threshold; });
  return out;
}

SimilarityGraph build_similarity_graph(std::span<const Patch> universe,
                                       const SimilarityConfig& config,
                                       const GraphOptions& options) {
  SimilarityGraph graph;
  graph.threshold = config.threshold;
  graph.vertices.reserve(universe.size());
  for (const auto& p : universe) graph.vertices.push_back(p.id);

  auto pairs = options.execution == Execution::parallel ? kernels::candidate_pairs(universe)
                                                        : reference::candidate_pairs(universe);
  if (options.extra_filter) {
    std::erase_if(pairs, [&](const IndexPair& p) {
      return !options.extra_filter(universe[p.first], universe[p.second]);
    });
  }

  std::vector<SimilarityScore> scores(pairs.size());
  std::vector<std::string> keys;
  std::vector<IndexPair> missing;
  std::vector<std::size_t> missing_slot;
  if (options.cache) {
    std::vector<std::string> digests;
    digests.reserve(universe.size());
    for (const auto& p : universe) digests.push_back(patch_digest(p));
    keys.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      keys.push_back(ScoreCache::pair_key(digests[pairs[k].first], digests[pairs[k].second], config));
      if (auto hit = options.cache->find(keys.back())) {
        scores[k] = *hit;
        options.cache->count_hit();
      } else {
        missing.push_back(pairs[k]);
        missing_slot.push_back(k);
      }
    }
  } else {
    missing = pairs;
    missing_slot.resize(pairs.size());
    std::iota(missing_slot.begin(), missing_slot.end(), std::size_t{0});
  }

  const auto fresh = options.execution == Execution::parallel
                         ? kernels::score_pairs(universe, missing, config)
                         : reference::score_pairs(universe, missing, config);
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    scores[missing_slot[k]] = fresh[k];
    if (options.cache) options.cache->insert(keys[missing_slot[k]], fresh[k]);
  }

  graph.edges.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    graph.edges.push_back({pairs[k].first, pairs[k].second, scores[k]});
  }
  return graph;
}

std::vector<Cluster> connected_components(const SimilarityGraph& graph) {
  return connected_components(graph, graph.threshold);
}

std::vector<Cluster> connected_components(const SimilarityGraph& graph, double threshold) {
  DisjointSet sets(graph.vertices.size());
  for (const auto& e : graph.edges) {
    if (e.score.value > threshold) sets.unite(e.a, e.b);
  }
  std::map<std::size_t, std::vector<PatchId>> by_root;
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    by_root[sets.find(v)].push_back(graph.vertices[v]);
  }
  std::vector<Cluster> clusters;
  clusters.reserve(by_root.size());
  for (auto& [root, members] : by_root) {
    std::sort(members.begin(), members.end());
    Cluster c;
    c.id = members.front();
    c.members = std::move(members);
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& x, const Cluster& y) { return x.id < y.id; });
  return clusters;
}

}  // namespace offlist
