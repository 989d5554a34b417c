#include "doctest.h"

#include <fmt/format.h>

#include <random>
#include <set>

#include "offlist/clustering.hpp"

using namespace offlist;

namespace {

SimilarityGraph graph_of(std::size_t n, std::vector<std::tuple<std::size_t, std::size_t, double>> edges,
                         double threshold = 0.8) {
  SimilarityGraph g;
  g.threshold = threshold;
  for (std::size_t v = 0; v < n; ++v) g.vertices.push_back({std::string(1, static_cast<char>('a' + v)), Origin::mail});
  for (const auto& [a, b, w] : edges) g.edges.push_back({a, b, {w, 0, 0}});
  return g;
}

std::set<std::set<std::string>> partition(const std::vector<Cluster>& clusters) {
  std::set<std::set<std::string>> out;
  for (const auto& c : clusters) {
    std::set<std::string> s;
    for (const auto& m : c.members) s.insert(m.key);
    out.insert(s);
  }
  return out;
}

Patch p(const std::string& key, Origin origin, const std::string& file, const std::string& text) {
  CanonicalDiff d;
  d.files[file].added.emplace_back(tokenize_code(text));
  return make_patch({key, origin}, text, "", d, "a@x", {});
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("disjoint set") {
    DisjointSet s(4);
    CHECK(s.unite(0, 1));
    CHECK_FALSE(s.unite(1, 0));
    CHECK(s.find(0) == s.find(1));
    CHECK(s.find(2) != s.find(0));
    const auto v = s.add();
    CHECK(v == 4);
    CHECK(s.unite(4, 2));
    CHECK(s.size() == 5);
  }

  TEST_CASE("threshold is strict") {
    const auto g = graph_of(3, {{0, 1, 0.9}, {1, 2, 0.8}});
    CHECK(g.threshold_edges().size() == 1);
    CHECK(partition(connected_components(g)) == std::set<std::set<std::string>>{{"a", "b"}, {"c"}});
  }

  TEST_CASE("component examples") {
    CHECK(partition(connected_components(graph_of(4, {{0, 1, 1.0}, {1, 2, 1.0}}))) ==
          std::set<std::set<std::string>>{{"a", "b", "c"}, {"d"}});
    CHECK(connected_components(graph_of(3, {})).size() == 3);
    std::vector<std::tuple<std::size_t, std::size_t, double>> complete;
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b) complete.emplace_back(a, b, 0.95);
    CHECK(connected_components(graph_of(4, complete)).size() == 1);
  }

  TEST_CASE("clusters partition the universe and are ordered by id") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
      const std::size_t n = 1 + rng() % 26;
      std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          if (rng() % 10 == 0) edges.emplace_back(a, b, static_cast<double>(rng() % 100) / 100.0);
      const auto clusters = connected_components(graph_of(n, edges));
      std::size_t total = 0;
      for (std::size_t i = 0; i < clusters.size(); ++i) {
        REQUIRE_FALSE(clusters[i].members.empty());
        CHECK(clusters[i].id == clusters[i].members.front());
        CHECK(std::is_sorted(clusters[i].members.begin(), clusters[i].members.end()));
        if (i > 0) CHECK(clusters[i - 1].id < clusters[i].id);
        total += clusters[i].members.size();
      }
      CHECK(total == n);
    }
  }

  TEST_CASE("graph construction honours the prefilter and records every evaluated pair") {
    const std::vector<Patch> u = {p("m1", Origin::mail, "a.c", "x = 1;"), p("c1", Origin::commit, "a.c", "x = 1;"),
                                  p("c2", Origin::commit, "b.c", "x = 1;"), p("c3", Origin::commit, "a.c", "q r s t")};
    const auto g = build_similarity_graph(u, SimilarityConfig{});
    REQUIRE(g.edges.size() == 3);
    CHECK(g.edges[0].a == 0);
    CHECK(g.edges[0].b == 1);
    CHECK(g.edges[0].score.value == 1.0);
    CHECK(g.threshold_edges().size() == 1);
    const auto clusters = connected_components(g);
    CHECK(clusters.size() == 3);
    CHECK(clusters.front().id.key == "c1");

    CHECK(build_similarity_graph(std::vector<Patch>{u[0]}, SimilarityConfig{}).edges.empty());
    CHECK(build_similarity_graph(std::vector<Patch>{u[0], u[2]}, SimilarityConfig{}).edges.empty());
  }

  TEST_CASE("serial, parallel and cached graphs agree") {
    std::vector<Patch> u;
    for (int i = 0; i < 40; ++i) {
      u.push_back(p(fmt::format("k{:02}", i), i % 3 ? Origin::commit : Origin::mail, fmt::format("f{}.c", i % 4),
                    fmt::format("v{} = w{};", i % 5, i % 7)));
    }
    const SimilarityConfig config;
    const auto serial = build_similarity_graph(u, config, {Execution::serial, nullptr, {}});
    const auto parallel = build_similarity_graph(u, config, {Execution::parallel, nullptr, {}});
    ScoreCache cache;
    const auto cold = build_similarity_graph(u, config, {Execution::parallel, &cache, {}});
    const auto warm = build_similarity_graph(u, config, {Execution::parallel, &cache, {}});
    CHECK(cache.hits() == serial.edges.size());
    for (const auto* g : {&parallel, &cold, &warm}) {
      REQUIRE(g->edges.size() == serial.edges.size());
      for (std::size_t k = 0; k < serial.edges.size(); ++k) CHECK(g->edges[k].score.value == serial.edges[k].score.value);
    }
  }

  TEST_CASE("extra filter drops pairs") {
    const std::vector<Patch> u = {p("m1", Origin::mail, "a.c", "x"), p("m2", Origin::mail, "a.c", "x"),
                                  p("c1", Origin::commit, "a.c", "x")};
    GraphOptions options;
    options.extra_filter = [](const Patch& a, const Patch& b) { return a.origin() != b.origin(); };
    CHECK(build_similarity_graph(u, SimilarityConfig{}, options).edges.size() == 2);
  }
}
