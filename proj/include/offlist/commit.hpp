#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offlist/patch.hpp"
#include "offlist/timeutil.hpp"

namespace offlist {

struct Commit {
  std::string hash;  // 40 lowercase hex digits
  std::string author_name;
  std::string author_email;
  Timestamp author_date{};
  Timestamp commit_date{};
  std::string subject;
  std::string body;
  std::vector<std::string> parents;
  std::string diff_text;

  bool is_merge() const { return parents.size() >= 2; }
};

struct CommitExclusion {
  bool revert = false;
  bool owner = false;
  bool merge = false;
  bool out_of_window = false;

  bool any() const { return revert || owner || merge || out_of_window; }
  // Merges and out-of-window commits never enter the similarity universe;
  // reverts and owner commits are clustered and excluded afterwards.
  bool in_universe() const { return !merge && !out_of_window; }
  friend bool operator==(const CommitExclusion&, const CommitExclusion&) = default;
};

// Half-open [start, end).
struct TimeWindow {
  Timestamp start = Timestamp::min();
  Timestamp end = Timestamp::max();
};

bool is_valid_commit_hash(std::string_view hash);

// Newline-delimited JSON export, one object per line with the fields
// hash, author_name, author_email, author_date, commit_date, subject, body,
// parents, diff. Blank lines are ignored. Throws InputError naming the line
// for malformed records and duplicate hashes.
std::vector<Commit> load_commits(std::istream& in);
std::vector<Commit> load_commits_file(const std::filesystem::path& path);

void write_commits(std::ostream& out, std::span<const Commit> commits);

// Runs `git log -p` in `repo` and converts its output, newest first.
std::vector<Commit> export_repository(const std::filesystem::path& repo);

// Message is subject + body with trailers stripped; an empty diff yields an
// empty CanonicalDiff (such a patch never passes the prefilter).
Patch extract_commit_patch(const Commit& commit);

// `Revert "` prefix after any leading bracketed tags; case-sensitive.
bool is_revert(const Commit& commit);

// Author email against the owner glob patterns (the export carries no
// committer identity).
bool is_owner_commit(const Commit& commit, std::span<const std::string> owners);

bool in_author_window(const Commit& commit, const TimeWindow& window);

CommitExclusion evaluate_exclusions(const Commit& commit, std::span<const std::string> owners,
                                    const TimeWindow& window);

}  // namespace offlist
