// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "offlist/engine.hpp"
#include "offlist/kernels.hpp"
#include "offlist/report.hpp"
#include "offlist/similarity.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace offlist;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t oracle_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len, std::size_t alphabet) {
  std::vector<std::string> out(std::uniform_int_distribution<std::size_t>(0, max_len)(rng));
  for (auto& t : out) t = fmt::format("t{}", std::uniform_int_distribution<std::size_t>(0, alphabet - 1)(rng));
  return out;
}

Outcome criterion_similarity_oracle() {
  std::mt19937_64 rng(101);
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_tokens(rng, 12, 1 + k % 8);
    const auto b = random_tokens(rng, 12, 1 + k % 8);
    const std::size_t longest = std::max(a.size(), b.size());
    const double expected =
        longest == 0 ? 1.0 : 1.0 - static_cast<double>(oracle_distance(a, b)) / static_cast<double>(longest);
    if (sim_message(TokenSeq(a), TokenSeq(b)) != expected) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 10.0,
          fmt::format("1000 pairs, {} mismatches vs brute-force DP, {:.3f}s (limit 10s)", mismatches, elapsed)};
}

Patch random_patch(std::mt19937_64& rng, const std::string& key, Origin origin) {
  std::uniform_int_distribution<int> small(0, 4);
  std::string subject = fmt::format("sub{}: ", small(rng));
  for (const auto& t : random_tokens(rng, 8, 6)) subject += t + " ";
  std::string body;
  for (const auto& t : random_tokens(rng, 20, 10)) body += t + " ";
  std::string diff;
  const int files = 1 + small(rng) % 3;
  for (int f = 0; f < files; ++f) {
    const std::string path = fmt::format("dir/file{}.c", small(rng));
    std::vector<std::string> removed;
    std::vector<std::string> added;
    for (int i = 0, n = small(rng); i < n; ++i) removed.push_back(fmt::format("x{} = y{};", small(rng), small(rng)));
    for (int i = 0, n = small(rng); i < n; ++i) added.push_back(fmt::format("f{}(a{}, {});", small(rng), small(rng), small(rng)));
    diff += fmt::format("diff --git a/{0} b/{0}\n--- a/{0}\n+++ b/{0}\n@@ -1,{1} +1,{2} @@\n", path, removed.size(),
                        added.size());
    for (const auto& l : removed) diff += "-" + l + "\n";
    for (const auto& l : added) diff += "+" + l + "\n";
  }
  return make_patch(PatchId{key, origin}, subject, body, normalize_diff_lenient(diff), "dev@example.org",
                    Timestamp{});
}

Outcome criterion_similarity_algebra() {
  std::mt19937_64 rng(202);
  const SimilarityConfig config;
  std::size_t violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_patch(rng, fmt::format("a{}", k), Origin::mail);
    const auto b = random_patch(rng, fmt::format("b{}", k), Origin::commit);
    const auto ab = sim(a, b, config);
    const auto ba = sim(b, a, config);
    if (ab.value != ba.value) ++violations;
    if (!(ab.value >= 0.0 && ab.value <= 1.0)) ++violations;
    if (sim(a, a, config).value != 1.0) ++violations;
    if (sim(b, b, config).value != 1.0) ++violations;
  }
  return {violations == 0, fmt::format("1000 random patch pairs, {} violations", violations)};
}

using Partition = std::set<std::set<std::size_t>>;

Partition partition_of(const SimilarityGraph& graph, const std::vector<Cluster>& clusters) {
  std::map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) index[graph.vertices[v].key] = v;
  Partition out;
  for (const auto& c : clusters) {
    std::set<std::size_t> s;
    for (const auto& m : c.members) s.insert(index.at(m.key));
    out.insert(s);
  }
  return out;
}

Partition closure_partition(const SimilarityGraph& graph, double threshold) {
  const std::size_t n = graph.vertices.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v) reach[v][v] = true;
  for (const auto& e : graph.edges) {
    if (e.score.value > threshold) reach[e.a][e.b] = reach[e.b][e.a] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  Partition out;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::size_t> s;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) s.insert(j);
    }
    out.insert(s);
  }
  return out;
}

SimilarityGraph random_graph(std::mt19937_64& rng, std::size_t max_vertices) {
  SimilarityGraph g;
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_vertices)(rng);
  for (std::size_t v = 0; v < n; ++v) g.vertices.push_back({fmt::format("v{:03}", v), v % 3 ? Origin::commit : Origin::mail});
  const double density = std::uniform_real_distribution<double>(0.0, 0.15)(rng);
  static constexpr double grid[] = {0.5, 0.7, 0.8, 0.85, 0.9, 1.0};
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (std::uniform_real_distribution<double>(0, 1)(rng) >= density) continue;
      SimilarityScore s;
      s.value = std::uniform_int_distribution<int>(0, 3)(rng) == 0
                    ? grid[std::uniform_int_distribution<std::size_t>(0, std::size(grid) - 1)(rng)]
                    : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      g.edges.push_back({a, b, s});
    }
  }
  return g;
}

Outcome criterion_clustering_oracle() {
  std::mt19937_64 rng(303);
  std::size_t mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    const auto g = random_graph(rng, 50);
    if (partition_of(g, connected_components(g)) != closure_partition(g, g.threshold)) ++mismatches;
  }
  return {mismatches == 0, fmt::format("200 random graphs (<= 50 vertices), {} mismatches vs transitive closure",
                                       mismatches)};
}

bool refines(const Partition& fine, const Partition& coarse) {
  for (const auto& f : fine) {
    const bool inside = std::any_of(coarse.begin(), coarse.end(), [&](const std::set<std::size_t>& c) {
      return std::includes(c.begin(), c.end(), f.begin(), f.end());
    });
    if (!inside) return false;
  }
  return true;
}

Outcome criterion_threshold_semantics() {
  SimilarityGraph pair;
  pair.threshold = 0.8;
  pair.vertices = {{"a", Origin::mail}, {"b", Origin::commit}, {"c", Origin::commit}};
  pair.edges = {{0, 1, {0.9, 0, 0}}, {1, 2, {0.8, 0, 0}}};
  const auto clusters = connected_components(pair);
  const bool strict = clusters.size() == 2 && clusters[0].members.size() == 2 && clusters[1].members.size() == 1;

  std::mt19937_64 rng(404);
  std::size_t violations = 0;
  static constexpr double thresholds[] = {0.5, 0.7, 0.8, 0.85, 0.9, 0.95};
  for (int k = 0; k < 100; ++k) {
    const auto g = random_graph(rng, 50);
    for (std::size_t i = 0; i < std::size(thresholds); ++i) {
      for (std::size_t j = i; j < std::size(thresholds); ++j) {
        const auto coarse = partition_of(g, connected_components(g, thresholds[i]));
        const auto fine = partition_of(g, connected_components(g, thresholds[j]));
        if (!refines(fine, coarse)) ++violations;
      }
    }
  }
  return {strict && violations == 0,
          fmt::format("edge at exactly t excluded: {}; 100 random graphs, {} refinement violations",
                      strict ? "yes" : "no", violations)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

Outcome criterion_planted_truth(const fs::path& work) {
  const auto corpus = testing::generate_corpus({});
  write_file(work / "planted.mbox", corpus.mbox());
  write_file(work / "planted.ndjson", corpus.commits_ndjson());

  const auto start = Clock::now();
  const MailSource source{MailSource::Kind::mbox, work / "planted.mbox", "lkml"};
  const auto mails = parse_mail_corpus(std::span(&source, 1));
  const auto commits = load_commits_file(work / "planted.ndjson");
  const auto report = run_analysis(mails.mails, commits, corpus.config);
  const double elapsed = seconds_since(start);

  std::set<std::string> flagged;
  for (const auto& c : report.candidates) {
    if (c.flagged) flagged.insert(c.commit);
  }
  std::size_t true_positive = 0;
  for (const auto& h : flagged) true_positive += corpus.expected_flagged.count(h);
  const double recall = corpus.expected_flagged.empty()
                            ? 1.0
                            : static_cast<double>(true_positive) / static_cast<double>(corpus.expected_flagged.size());
  const double precision =
      flagged.empty() ? 1.0 : static_cast<double>(true_positive) / static_cast<double>(flagged.size());
  const bool pass = mails.mails.size() == 10000 && commits.size() == 2000 && recall == 1.0 && precision == 1.0 &&
                    elapsed <= 60.0;
  return {pass, fmt::format("N={} mails, M={} commits, flagged {} / planted {}, recall {:.4f}, precision {:.4f}, "
                            "mapped {}, raw {}, {:.2f}s (limit 60s)",
                            mails.mails.size(), commits.size(), flagged.size(), corpus.expected_flagged.size(), recall,
                            precision, report.counts.mapped, report.counts.raw_candidates, elapsed)};
}

Outcome criterion_published_arithmetic() {
  // 1,240 candidate records: 64 reverts, 48 owner commits, the rest flagged.
  AnalysisReport report;
  for (std::size_t i = 0; i < 1240; ++i) {
    OffListCandidate c;
    c.commit = fmt::format("{:040x}", i);
    c.cluster_id = c.commit;
    c.exclusions.revert = i < 64;
    c.exclusions.owner = i >= 64 && i < 112;
    c.flagged = !c.exclusions.any();
    report.candidates.push_back(c);
  }
  report.counts = SummaryCounts::from_exclusions(516197, 0, 30396, 1240, 64, 48);
  const auto summary = emit_summary(report);
  const auto parsed = parse_summary_counts(summary);
  const auto recomputed = recount(render_candidates(report), std::nullopt);
  const bool pass = report.counts.flagged == 1128 && report.counts.mapped == 29156 &&
                    fmt::format("{:.4f}", report.counts.mapped_fraction()) == "0.9592" &&
                    summary.find("0.9592") != std::string::npos && parsed == report.counts &&
                    recomputed.raw_candidates == 1240 && recomputed.reverts == 64 && recomputed.owners == 48 &&
                    recomputed.flagged == 1128 && report.counts.consistent();
  return {pass, fmt::format("1240 - (64 + 48) = {}; mapped {}/{} = {:.4f}", report.counts.flagged,
                            report.counts.mapped, report.counts.universe_commits, report.counts.mapped_fraction())};
}

testing::SyntheticSpec fixture_spec(std::uint64_t seed) {
  testing::SyntheticSpec spec;
  spec.seed = seed;
  spec.mails = 400;
  spec.commits = 120;
  spec.off_list = 14;
  spec.reverts = 3;
  spec.owner_reverts = 1;
  spec.owners = 3;
  spec.replies = 40;
  spec.pull_requests = 6;
  spec.bot_mails = 6;
  spec.backport_notices = 6;
  spec.file_pool = 80;
  return spec;
}

Outcome criterion_incremental_equivalence(const fs::path& work) {
  const auto corpus = testing::generate_corpus(fixture_spec(7));
  const auto batch = run_analysis(corpus.mails, corpus.commits, corpus.config);
  std::set<std::string> batch_flagged;
  for (const auto& c : batch.candidates) {
    if (c.flagged) batch_flagged.insert(c.commit);
  }
  const auto batch_jsonl = render_candidates(batch);

  std::mt19937_64 rng(707);
  std::size_t mismatches = 0;
  std::size_t retractions = 0;
  for (int perm = 0; perm < 50; ++perm) {
    // Arrival order: every mail and commit in a random order, delivered in
    // random-sized batches; every fifth run round-trips the state on disk.
    std::vector<std::pair<bool, std::size_t>> arrivals;
    for (std::size_t i = 0; i < corpus.mails.size(); ++i) arrivals.emplace_back(true, i);
    for (std::size_t i = 0; i < corpus.commits.size(); ++i) arrivals.emplace_back(false, i);
    std::shuffle(arrivals.begin(), arrivals.end(), rng);

    const fs::path state_dir = work / fmt::format("state{}", perm);
    AnalysisState state(corpus.config);
    std::size_t pos = 0;
    while (pos < arrivals.size()) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
      std::vector<MailArtifact> mails;
      std::vector<Commit> commits;
      for (; pos < arrivals.size() && n > mails.size() + commits.size(); ++pos) {
        if (arrivals[pos].first) {
          mails.push_back(corpus.mails[arrivals[pos].second]);
        } else {
          commits.push_back(corpus.commits[arrivals[pos].second]);
        }
      }
      const auto update = state.update(commits, mails);
      for (const auto& e : update.events) retractions += e.kind == IncrementalEvent::Kind::retracted;
      if (perm % 5 == 0) {
        state.save(state_dir);
        state = AnalysisState::load(state_dir, corpus.config);
      }
    }
    if (state.flagged() != batch_flagged || render_candidates(state.report()) != batch_jsonl) ++mismatches;
  }
  return {mismatches == 0 && retractions > 0,
          fmt::format("50 arrival orders, {} mismatches vs batch ({} flagged), {} late-mail retractions", mismatches,
                      batch_flagged.size(), retractions)};
}

Outcome criterion_determinism(const fs::path& work) {
  auto spec = fixture_spec(8);
  spec.mails = 1500;
  spec.commits = 400;
  spec.off_list = 30;
  spec.file_pool = 300;
  const auto corpus = testing::generate_corpus(spec);
  write_file(work / "det.mbox", corpus.mbox());
  write_file(work / "det.ndjson", corpus.commits_ndjson());
  std::ofstream(work / "owners.txt") << "*@owner.example\n";

  std::vector<std::string> runs;
  std::size_t failures = 0;
  const std::vector<std::string> variants = {"--threads 1", "--threads 1", "--threads 4", "--threads 4",
                                             "--threads 3", "--threads 2"};
  for (std::size_t i = 0; i < variants.size() + 1; ++i) {
    const auto out = work / fmt::format("det{}", i);
    const std::string mode = i < variants.size() ? variants[i] : "--threads 2";
    const std::string serial = i < variants.size() ? "" : " --serial";
    const auto command = fmt::format(
        "'{}' {} analyze --mbox '{}' --commits '{}' --owners '{}' --since 2019-03-01T00:00:00Z "
        "--until 2019-10-01T00:00:00Z --out '{}'{} > /dev/null",
        OFFLIST_CLI_PATH, mode, (work / "det.mbox").string(), (work / "det.ndjson").string(),
        (work / "owners.txt").string(), out.string(), serial);
    if (std::system(command.c_str()) != 0) ++failures;
    runs.push_back(read_file(out / "candidates.jsonl") + "\x1e" + read_file(out / "summary.txt"));
  }
  const bool identical = std::all_of(runs.begin(), runs.end(), [&](const std::string& r) { return r == runs.front(); });
  const auto lines = std::count(runs.front().begin(), runs.front().end(), '\n');
  return {failures == 0 && identical && lines > 10,
          fmt::format("{} analyze runs (threads 1,1,4,4,3,2 and serial), outputs {}", runs.size(),
                      identical ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / fmt::format("offlist-acceptance-{}", ::getpid());
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"similarity oracle", criterion_similarity_oracle},
      {"similarity algebra", criterion_similarity_algebra},
      {"clustering oracle", criterion_clustering_oracle},
      {"threshold semantics", criterion_threshold_semantics},
      {"planted-truth end-to-end", [&] { return criterion_planted_truth(work); }},
      {"published exclusion arithmetic", criterion_published_arithmetic},
      {"batch/incremental equivalence", [&] { return criterion_incremental_equivalence(work); }},
      {"determinism", [&] { return criterion_determinism(work); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    fmt::print("[{}] {}. {}: {}\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, outcome.detail);
    std::fflush(stdout);
    failed += outcome.pass ? 0 : 1;
  }
  fs::remove_all(work);
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
