// offlist: find commits that never appeared as a patch on a mailing list.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "offlist/config.hpp"
#include "offlist/engine.hpp"
#include "offlist/error.hpp"
#include "offlist/kernels.hpp"

namespace fs = std::filesystem;
using namespace offlist;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

struct MailInputs {
  std::vector<std::string> mboxes;
  std::vector<std::string> maildirs;
  std::vector<std::string> exports;
  std::string list_name;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--mbox", mboxes, "mbox archive (repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--maildir", maildirs, "maildir directory, read recursively (repeatable)")
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--mails", exports, "mail export written by ingest-mail (repeatable)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--list-name", list_name, "list name recorded for --mbox/--maildir sources (default: file name)");
  }

  bool empty() const { return mboxes.empty() && maildirs.empty() && exports.empty(); }

  std::vector<MailArtifact> load() const {
    std::vector<MailSource> sources;
    const auto source = [&](MailSource::Kind kind, const std::string& path) {
      MailSource s;
      s.kind = kind;
      s.path = path;
      s.list_name = list_name.empty() ? fs::path(path).filename().string() : list_name;
      sources.push_back(std::move(s));
    };
    for (const auto& p : mboxes) source(MailSource::Kind::mbox, p);
    for (const auto& p : maildirs) source(MailSource::Kind::maildir, p);
    auto corpus = parse_mail_corpus(sources);
    for (const auto& d : corpus.diagnostics) std::cerr << "warning: " << d << '\n';
    for (const auto& p : exports) {
      auto more = load_mails_file(p);
      corpus.mails.insert(corpus.mails.end(), std::make_move_iterator(more.begin()),
                          std::make_move_iterator(more.end()));
    }
    return std::move(corpus.mails);
  }
};

struct CommitInputs {
  std::vector<std::string> exports;
  std::string repo;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--commits", exports, "commit export (NDJSON, repeatable)")->check(CLI::ExistingFile);
    cmd->add_option("--repo", repo, "git repository to read commits from")->check(CLI::ExistingDirectory);
  }

  std::vector<Commit> load() const {
    std::vector<Commit> commits;
    if (!repo.empty()) commits = export_repository(repo);
    for (const auto& p : exports) {
      auto more = load_commits_file(p);
      commits.insert(commits.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    return commits;
  }
};

struct ConfigInputs {
  std::string config_file;
  std::string since;
  std::string until;
  std::string owners_file;
  std::vector<std::string> owners;
  std::optional<double> threshold;
  std::optional<double> message_weight;
  std::optional<int> edge_margin_days;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "configuration file ([similarity], [filters], [window], [owners])")
        ->check(CLI::ExistingFile);
    cmd->add_option("--since", since, "start of the author-date window, RFC 3339 (inclusive)");
    cmd->add_option("--until", until, "end of the author-date window, RFC 3339 (exclusive)");
    cmd->add_option("--owners", owners_file, "file of owner email globs, one per line")->check(CLI::ExistingFile);
    cmd->add_option("--owner", owners, "owner email glob (repeatable)");
    cmd->add_option("--threshold", threshold, "similarity threshold t; edges need score > t (default 0.8)");
    cmd->add_option("--message-weight", message_weight, "weight of the message score (default 0.4)");
    cmd->add_option("--edge-margin-days", edge_margin_days,
                    "window_edge warning margin after --since, in days (default 14)");
  }

  // File values first, then flag overrides.
  AnalysisConfig resolve() const {
    AnalysisConfig config = config_file.empty() ? AnalysisConfig{} : load_config(config_file);
    const auto time = [](const char* flag, const std::string& value) {
      try {
        return parse_rfc3339(value);
      } catch (const InputError& e) {
        throw ConfigError(fmt::format("{}: {}", flag, e.what()));
      }
    };
    if (!since.empty()) config.since = time("--since", since);
    if (!until.empty()) config.until = time("--until", until);
    if (!owners_file.empty()) {
      auto more = load_owner_file(owners_file);
      config.owners.insert(config.owners.end(), more.begin(), more.end());
    }
    config.owners.insert(config.owners.end(), owners.begin(), owners.end());
    if (threshold) config.similarity.threshold = *threshold;
    if (message_weight) config.similarity.message_weight = *message_weight;
    if (edge_margin_days) {
      if (*edge_margin_days < 0) throw ConfigError("--edge-margin-days must be >= 0");
      config.window_edge_margin = std::chrono::days{*edge_margin_days};
    }
    validate(config);
    return config;
  }
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_counts(const SummaryCounts& c) {
  fmt::print("commits in window {}, mapped {} ({:.4f}), raw candidates {}, flagged {}\n", c.universe_commits,
             c.mapped, c.mapped_fraction(), c.raw_candidates, c.flagged);
}

bool check_counts(const SummaryCounts& summary, const SummaryCounts& recomputed, bool with_dump) {
  bool ok = true;
  const auto check = [&](const char* name, std::size_t expected, std::size_t actual) {
    if (expected == actual) return;
    fmt::print(stderr, "mismatch: {} is {} in summary.txt but {} recomputed\n", name, expected, actual);
    ok = false;
  };
  check("raw off-list candidates", summary.raw_candidates, recomputed.raw_candidates);
  check("excluded reverts", summary.reverts, recomputed.reverts);
  check("excluded owner commits", summary.owners, recomputed.owners);
  check("flagged for review", summary.flagged, recomputed.flagged);
  if (with_dump) {
    check("commits in window", summary.universe_commits, recomputed.universe_commits);
    check("mapped commits", summary.mapped, recomputed.mapped);
    check("mail patches in universe", summary.mail_patches, recomputed.mail_patches);
  }
  if (!summary.consistent()) {
    fmt::print(stderr, "summary.txt counts are not arithmetically consistent\n");
    ok = false;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect commits that have no counterpart patch on a mailing list."};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads for scoring (0: OpenMP default)")->check(CLI::NonNegativeNumber);

  MailInputs ingest_mail_inputs;
  std::string ingest_mail_out;
  auto* ingest_mail = app.add_subcommand("ingest-mail", "parse mail archives into a deduplicated mail export");
  ingest_mail_inputs.add_to(ingest_mail);
  ingest_mail->add_option("--out", ingest_mail_out, "output file (NDJSON)")->required();

  CommitInputs ingest_commits_inputs;
  std::string ingest_commits_out;
  auto* ingest_commits = app.add_subcommand("ingest-commits", "export a git repository's history as NDJSON");
  ingest_commits_inputs.add_to(ingest_commits);
  ingest_commits->add_option("--out", ingest_commits_out, "output file (NDJSON)")->required();

  MailInputs analyze_mails;
  CommitInputs analyze_commits;
  ConfigInputs analyze_config;
  std::string analyze_out;
  std::string dump_clusters;
  std::string cache_dir;
  bool serial = false;
  auto* analyze = app.add_subcommand("analyze", "batch analysis: cluster mails and commits, list off-list commits");
  analyze_mails.add_to(analyze);
  analyze_commits.add_to(analyze);
  analyze_config.add_to(analyze);
  analyze->add_option("--out", analyze_out, "report directory (candidates.jsonl, summary.txt)")->required();
  analyze->add_option("--dump-clusters", dump_clusters, "write every cluster with its class as NDJSON");
  analyze->add_option("--cache", cache_dir, "score cache directory, reused across runs");
  analyze->add_flag("--serial", serial, "use the serial reference kernels");

  MailInputs watch_mails;
  CommitInputs watch_commits;
  ConfigInputs watch_config;
  std::string state_dir;
  std::string watch_out;
  auto* watch = app.add_subcommand("watch", "incremental analysis of newly arrived commits and mails");
  watch_mails.add_to(watch);
  watch_commits.add_to(watch);
  watch_config.add_to(watch);
  watch->add_option("--state", state_dir, "state directory (created on first use; delete to force a rebuild)")
      ->required();
  watch->add_option("--out", watch_out, "also write the cumulative report to this directory");

  std::string report_dir;
  std::string report_clusters;
  auto* report = app.add_subcommand("report", "recompute summary counts from a report directory and check them");
  report->add_option("--from", report_dir, "report directory written by analyze")
      ->required()
      ->check(CLI::ExistingDirectory);
  report->add_option("--clusters", report_clusters, "cluster dump written by analyze --dump-clusters")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    set_kernel_threads(threads);

    if (*ingest_mail) {
      if (ingest_mail_inputs.empty()) throw ConfigError("ingest-mail needs --mbox, --maildir or --mails");
      const auto mails = ingest_mail_inputs.load();
      std::ofstream out(ingest_mail_out, std::ios::binary | std::ios::trunc);
      if (!out) throw InputError(fmt::format("cannot write {}", ingest_mail_out));
      write_mails(out, mails);
      fmt::print("{} messages\n", mails.size());
    } else if (*ingest_commits) {
      if (ingest_commits_inputs.repo.empty() && ingest_commits_inputs.exports.empty()) {
        throw ConfigError("ingest-commits needs --repo or --commits");
      }
      const auto commits = ingest_commits_inputs.load();
      std::ofstream out(ingest_commits_out, std::ios::binary | std::ios::trunc);
      if (!out) throw InputError(fmt::format("cannot write {}", ingest_commits_out));
      write_commits(out, commits);
      fmt::print("{} commits\n", commits.size());
    } else if (*analyze) {
      const auto config = analyze_config.resolve();
      const auto mails = analyze_mails.load();
      const auto commits = analyze_commits.load();
      ScoreCache cache;
      RunOptions options;
      options.execution = serial ? Execution::serial : Execution::parallel;
      if (!cache_dir.empty()) {
        cache.load(cache_dir);
        options.cache = &cache;
      }
      const auto result = run_analysis(mails, commits, config, options);
      emit_report(result, analyze_out);
      if (!dump_clusters.empty()) write_cluster_dump(result, dump_clusters);
      if (!cache_dir.empty()) cache.save(cache_dir);
      print_counts(result.counts);
    } else if (*watch) {
      const auto config = watch_config.resolve();
      const auto mails = watch_mails.load();
      const auto commits = watch_commits.load();
      auto state = AnalysisState::load(state_dir, config);
      const auto update = state.update(commits, mails);
      for (const auto& e : update.events) {
        if (e.kind == IncrementalEvent::Kind::flagged) {
          fmt::print("flagged {}\n", e.commit);
        } else {
          fmt::print("retracted {}{}\n", e.commit, e.message_id ? fmt::format(" (matches {})", *e.message_id) : "");
        }
      }
      state.save(state_dir);
      const auto cumulative = state.report();
      if (!watch_out.empty()) emit_report(cumulative, watch_out);
      print_counts(cumulative.counts);
    } else if (*report) {
      const fs::path dir = report_dir;
      const auto candidates = read_text(dir / "candidates.jsonl");
      std::optional<std::string> dump;
      if (!report_clusters.empty()) dump = read_text(report_clusters);
      const auto recomputed = recount(candidates, dump ? std::optional<std::string_view>(*dump) : std::nullopt);
      const auto summary = parse_summary_counts(read_text(dir / "summary.txt"));
      fmt::print("raw candidates {}, reverts {}, owners {}, flagged {}\n", recomputed.raw_candidates,
                 recomputed.reverts, recomputed.owners, recomputed.flagged);
      if (dump) {
        fmt::print("commits in window {}, mapped {}, mail patches {}\n", recomputed.universe_commits,
                   recomputed.mapped, recomputed.mail_patches);
      }
      if (!check_counts(summary, recomputed, dump.has_value())) return kExitInput;
      fmt::print("summary.txt is consistent\n");
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "offlist: config error: {}\n", e.what());
    return kExitConfig;
  } catch (const InputError& e) {
    fmt::print(stderr, "offlist: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "offlist: {}\n", e.what());
    return kExitInput;
  }
  return 0;
}
