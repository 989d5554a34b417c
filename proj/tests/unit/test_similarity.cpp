#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "offlist/error.hpp"
#include "offlist/similarity.hpp"

using namespace offlist;
using Tokens = std::vector<std::string>;

namespace {

TokenSeq seq(Tokens t) { return TokenSeq(std::move(t)); }

CanonicalDiff one_file(const std::string& path, std::vector<Tokens> added, std::vector<Tokens> removed = {}) {
  CanonicalDiff d;
  auto& f = d.files[path];
  for (auto& t : added) f.added.push_back(seq(std::move(t)));
  for (auto& t : removed) f.removed.push_back(seq(std::move(t)));
  return d;
}

std::size_t dp_distance(const Tokens& a, const Tokens& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

double line_score(const Tokens& a, const Tokens& b) {
  const auto m = std::max(a.size(), b.size());
  return m == 0 ? 1.0 : 1.0 - static_cast<double>(dp_distance(a, b)) / static_cast<double>(m);
}

// Best total over every injective pairing of the shorter list into the longer.
double best_pairing(const std::vector<Tokens>& a, const std::vector<Tokens>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::vector<std::size_t> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small.size(); ++i) total += line_score(small[i], large[perm[i]]);
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<TokenSeq> seqs(const std::vector<Tokens>& lines) {
  std::vector<TokenSeq> out;
  for (const auto& l : lines) out.push_back(seq(l));
  return out;
}

Patch patch(const std::string& key, Origin origin, const std::string& subject, CanonicalDiff diff) {
  return make_patch({key, origin}, subject, "", diff, "a@x", {});
}

}  // namespace

TEST_SUITE("similarity") {
  TEST_CASE("levenshtein against the full dynamic program") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 500; ++k) {
      Tokens a(rng() % 13);
      Tokens b(rng() % 13);
      for (auto& t : a) t = std::string(1, static_cast<char>('a' + rng() % 4));
      for (auto& t : b) t = std::string(1, static_cast<char>('a' + rng() % 4));
      CHECK(levenshtein<std::string>(a, b) == dp_distance(a, b));
    }
  }

  TEST_CASE("sim_message") {
    CHECK(sim_message(seq({"a", "b", "c"}), seq({"a", "b", "c"})) == 1.0);
    CHECK(sim_message(seq({"a", "b", "c"}), seq({"a", "x", "c"})) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(sim_message(seq({"a", "b"}), seq({"c", "d"})) == 0.0);
    CHECK(sim_message(seq({}), seq({})) == 1.0);
    CHECK(sim_message(seq({}), seq({"a"})) == 0.0);
  }

  TEST_CASE("sim_diff basics") {
    const auto d = one_file("f.c", {{"a", "=", "1"}}, {{"b"}});
    CHECK(sim_diff(d, d) == 1.0);
    CHECK(sim_diff(d, one_file("g.c", {{"a", "=", "1"}})) == 0.0);
    CHECK(sim_diff(CanonicalDiff{}, CanonicalDiff{}) == 0.0);
    // Binary-only change on both sides counts as a full match.
    CHECK(sim_diff(one_file("logo.png", {}), one_file("logo.png", {})) == 1.0);
    // Added lines never pair with removed lines.
    CHECK(sim_diff(one_file("f.c", {{"x"}}), one_file("f.c", {}, {{"x"}})) == 0.0);
  }

  TEST_CASE("one of two lines altered by one token of four") {
    const std::vector<Tokens> a = {{"w", "x", "y", "z"}, {"p", "q", "r", "s"}};
    const std::vector<Tokens> b = {{"w", "x", "y", "z"}, {"p", "q", "r", "t"}};
    const double oracle = best_pairing(a, b) / 2.0;
    CHECK(oracle == 0.875);
    CHECK(sim_diff(one_file("f.c", a), one_file("f.c", b)) == oracle);
  }

  TEST_CASE("files on one side only add to the denominator") {
    auto a = one_file("f.c", {{"x"}, {"y"}});
    auto b = one_file("f.c", {{"x"}, {"y"}});
    b.files["g.c"].added.push_back(seq({"z"}));
    b.files["g.c"].added.push_back(seq({"w"}));
    CHECK(sim_diff(a, b) == 0.5);
  }

  TEST_CASE("greedy pairing never beats the exhaustive optimum and matches it on near-copies") {
    std::mt19937_64 rng(12);
    const auto random_line = [&] {
      Tokens t(1 + rng() % 4);
      for (auto& x : t) x = std::string(1, static_cast<char>('a' + rng() % 5));
      return t;
    };
    for (int k = 0; k < 300; ++k) {
      std::vector<Tokens> a(1 + rng() % 5);
      std::vector<Tokens> b(1 + rng() % 5);
      for (auto& l : a) l = random_line();
      for (auto& l : b) l = random_line();
      const auto sa = seqs(a);
      const auto sb = seqs(b);
      const double greedy = match_lines(sa, sb);
      CHECK(greedy <= best_pairing(a, b) + 1e-12);
      CHECK(greedy == match_lines(sb, sa));

      // A copy with one line replaced: greedy equals the optimum.
      auto c = a;
      c[rng() % c.size()] = random_line();
      CHECK(match_lines(sa, seqs(c)) == doctest::Approx(best_pairing(a, c)).epsilon(1e-12));
    }
  }

  TEST_CASE("combined score") {
    const SimilarityConfig config;
    const auto d = one_file("f.c", {{"x", "y"}});
    const auto a = patch("m", Origin::mail, "one two", d);
    const auto b = patch("c", Origin::commit, "one three", d);
    const auto s = sim(a, b, config);
    CHECK(s.message_component == 0.5);
    CHECK(s.diff_component == 1.0);
    CHECK(s.value == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(sim(a, a, config).value == 1.0);
    SimilarityConfig odd;
    odd.message_weight = 0.37;
    CHECK(sim(a, a, odd).value == 1.0);
  }

  TEST_CASE("prefilter") {
    const auto ac = patch("1", Origin::mail, "s", one_file("a.c", {{"x"}}));
    const auto bc = patch("2", Origin::mail, "s", one_file("b.c", {{"x"}}));
    auto both_diff = one_file("a.c", {{"x"}});
    both_diff.files["b.c"];
    const auto both = patch("3", Origin::mail, "s", both_diff);
    const auto none = patch("4", Origin::mail, "s", {});
    CHECK_FALSE(prefilter(ac, bc));
    CHECK(prefilter(both, bc));
    CHECK_FALSE(prefilter(none, both));
    CHECK_FALSE(prefilter(none, none));
  }

  TEST_CASE("config validation") {
    CHECK_NOTHROW(validate(SimilarityConfig{}));
    CHECK_THROWS_AS(validate(SimilarityConfig{1.5, 0.8}), ConfigError);
    CHECK_THROWS_AS(validate(SimilarityConfig{0.4, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate(SimilarityConfig{0.4, 0.0}), ConfigError);
  }
}
