#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "offlist/clustering.hpp"
#include "offlist/commit.hpp"
#include "offlist/config.hpp"
#include "offlist/mail.hpp"
#include "offlist/report.hpp"
#include "offlist/score_cache.hpp"

namespace offlist {

ClusterClass classify_cluster(const Cluster& cluster);

struct RunOptions {
  Execution execution = Execution::parallel;
  ScoreCache* cache = nullptr;
};

// Batch analysis: noise filtering, author-date window, universe, similarity
// graph, components, classification, exclusions, candidates. Throws
// InputError("nothing to analyze") when no commit enters the universe.
AnalysisReport run_analysis(std::span<const MailArtifact> mails, std::span<const Commit> commits,
                            const AnalysisConfig& config, const RunOptions& options = {});

// Whole days from `public_date` to `downstream_date`, floored; negative when
// the downstream side came first.
std::optional<long long> temporal_advantage(Timestamp public_date, std::optional<Timestamp> downstream_date);
// "+25d", "-5d", "0d" or "n/a".
std::string format_temporal_advantage(std::optional<long long> days);

struct IncrementalEvent {
  enum class Kind { flagged, retracted };
  Kind kind = Kind::flagged;
  std::string commit;
  // For retractions, the mail that now matches (or links through other
  // commits to) the commit's cluster, if known.
  std::optional<std::string> message_id;

  friend bool operator==(const IncrementalEvent&, const IncrementalEvent&) = default;
};

struct IncrementalUpdate {
  std::vector<OffListCandidate> candidates;  // newly flagged in this update
  std::vector<IncrementalEvent> events;      // flagged then retracted, by commit
};

// Persistent state of the `watch` mode. The union of all updates yields the
// same flagged set as a batch run over the union of the inputs, in any
// arrival order.
class AnalysisState {
 public:
  explicit AnalysisState(AnalysisConfig config);

  const AnalysisConfig& config() const { return config_; }
  const std::string& config_digest() const { return digest_; }

  IncrementalUpdate update(std::span<const Commit> new_commits, std::span<const MailArtifact> new_mails,
                           Execution execution = Execution::parallel);

  // Candidates and counts as a batch run would report them (no cluster dump).
  AnalysisReport report() const;
  std::set<std::string> flagged() const { return flagged_; }
  const ScoreCache& cache() const { return cache_; }

  // <dir>/manifest.json plus the score cache. The manifest is replaced
  // atomically.
  void save(const std::filesystem::path& dir) const;
  // Missing directory yields a fresh state. Throws ConfigError when the
  // state was built with a different configuration.
  static AnalysisState load(const std::filesystem::path& dir, const AnalysisConfig& config);

 private:
  struct CommitInfo {
    Timestamp author_date{};
    CommitExclusion exclusions;
    std::optional<std::size_t> vertex;
    std::optional<NearestMail> nearest;
  };

  std::size_t add_vertex(Patch patch);
  void link(std::size_t a, std::size_t b);
  // Mail vertex with the smallest message id in the set, or npos.
  std::size_t mail_of(std::size_t vertex) const;
  std::vector<OffListCandidate> collect_candidates() const;

  AnalysisConfig config_;
  std::string digest_;
  std::vector<Patch> patches_;
  std::vector<std::string> digests_;
  std::map<std::string, std::vector<std::size_t>> by_file_;
  mutable DisjointSet sets_;
  std::vector<std::size_t> mail_rep_;  // valid at set roots
  std::vector<std::pair<std::size_t, std::size_t>> links_;
  std::map<std::string, CommitInfo> commits_;
  std::set<std::string> messages_seen_;
  std::size_t messages_with_patches_ = 0;
  std::set<std::string> flagged_;
  ScoreCache cache_;
};

IncrementalUpdate update_incremental(AnalysisState& state, std::span<const Commit> new_commits,
                                     std::span<const MailArtifact> new_mails);

}  // namespace offlist
