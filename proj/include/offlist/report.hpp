#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offlist/clustering.hpp"
#include "offlist/commit.hpp"

namespace offlist {

enum class ClusterClass { unintegrated, integrated, off_list };

// "Unintegrated", "Integrated", "OffList".
std::string_view to_string(ClusterClass cls);

struct NearestMail {
  std::string message_id;
  double score = 0.0;

  friend bool operator==(const NearestMail&, const NearestMail&) = default;
};

// A commit whose cluster contains no mail patch.
struct OffListCandidate {
  std::string commit;
  Timestamp author_date{};
  std::string cluster_id;
  CommitExclusion exclusions;
  std::optional<NearestMail> nearest_mail;
  bool flagged = false;
  bool window_edge = false;

  friend bool operator==(const OffListCandidate&, const OffListCandidate&) = default;
};

struct ClusterRecord {
  Cluster cluster;
  ClusterClass cls = ClusterClass::unintegrated;
};

struct SummaryCounts {
  std::size_t messages_total = 0;
  std::size_t messages_with_patches = 0;
  std::size_t mail_patches = 0;  // kept mails in the universe
  std::size_t universe_commits = 0;
  std::size_t mapped = 0;
  std::size_t raw_candidates = 0;
  std::size_t reverts = 0;
  // Owner commits that are not also reverts, so that
  // flagged = raw_candidates - reverts - owners.
  std::size_t owners = 0;
  std::size_t flagged = 0;

  double mapped_fraction() const;
  // mapped + raw == universe and flagged == raw - reverts - owners.
  bool consistent() const;

  // Derives mapped and flagged from the exclusion accounting.
  static SummaryCounts from_exclusions(std::size_t messages_total, std::size_t messages_with_patches,
                                       std::size_t universe_commits, std::size_t raw_candidates,
                                       std::size_t reverts, std::size_t owners);

  friend bool operator==(const SummaryCounts&, const SummaryCounts&) = default;
};

struct AnalysisReport {
  std::string config_echo;
  SummaryCounts counts;
  std::vector<OffListCandidate> candidates;  // sorted by (author_date, commit)
  std::vector<ClusterRecord> clusters;       // sorted by cluster id
};

void sort_candidates(std::vector<OffListCandidate>& candidates);

// One JSON object per line:
// {commit, cluster_id, class, flagged, exclusions, nearest_mail, window_edge}
std::string render_candidates(const AnalysisReport& report);
std::string render_cluster_dump(const AnalysisReport& report);
std::string emit_summary(const AnalysisReport& report);

// Writes candidates.jsonl and summary.txt into `out_dir` (created if needed).
// Throws InputError when the directory cannot be written.
void emit_report(const AnalysisReport& report, const std::filesystem::path& out_dir);
void write_cluster_dump(const AnalysisReport& report, const std::filesystem::path& path);

// Counts recomputed from candidates.jsonl and a cluster dump. Message totals
// are not recoverable from these files and are left at zero; mail_patches,
// universe_commits and mapped come from the dump only when it is given.
SummaryCounts recount(std::string_view candidates_jsonl, std::optional<std::string_view> cluster_dump);

// Reads the counts section of a summary.txt.
SummaryCounts parse_summary_counts(std::string_view summary);

}  // namespace offlist
