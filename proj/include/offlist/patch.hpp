#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offlist/timeutil.hpp"

namespace offlist {

enum class Origin { mail, commit };

std::string_view to_string(Origin origin);

// A message-id for mail patches, a commit hash for commit patches. Ordered by
// key first so that "smallest member" is independent of origin.
struct PatchId {
  std::string key;
  Origin origin = Origin::mail;

  friend auto operator<=>(const PatchId&, const PatchId&) = default;
};

// Token sequence with precomputed 64-bit token hashes; edit distances run on
// the hashes, equality and ordering on the text.
class TokenSeq {
 public:
  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::span<const std::uint64_t> ids() const { return ids_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  friend bool operator==(const TokenSeq& a, const TokenSeq& b) { return a.tokens_ == b.tokens_; }
  friend std::weak_ordering operator<=>(const TokenSeq& a, const TokenSeq& b);

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> ids_;
};

struct FileChange {
  std::vector<TokenSeq> added;
  std::vector<TokenSeq> removed;

  std::size_t line_count() const { return added.size() + removed.size(); }
  friend bool operator==(const FileChange&, const FileChange&) = default;
  friend std::weak_ordering operator<=>(const FileChange& a, const FileChange& b);
};

// Payload-only view of a unified diff, keyed by post-image path. Context lines,
// index/mode lines and hunk offsets are not retained.
struct CanonicalDiff {
  std::map<std::string, FileChange> files;

  std::vector<std::string> affected() const;
  bool empty() const { return files.empty(); }
  std::size_t line_count() const;

  friend bool operator==(const CanonicalDiff&, const CanonicalDiff&) = default;
  friend std::weak_ordering operator<=>(const CanonicalDiff& a, const CanonicalDiff& b);
};

struct Patch {
  PatchId id;
  TokenSeq message;
  CanonicalDiff diff;
  std::string author_email;
  Timestamp author_date{};

  Origin origin() const { return id.origin; }
};

// Lowercased words; `_` is part of a word, and `/`, `.`, `-` join two word
// characters into one token (`x86/insn-eval`, `a/b.c`). Other punctuation is
// dropped.
std::vector<std::string> tokenize_text(std::string_view text);

// Like tokenize_text, but every other punctuation character becomes a
// single-character token. Used for diff payload lines.
std::vector<std::string> tokenize_code(std::string_view text);

// Throws InputError naming the first line with broken framing.
CanonicalDiff normalize_diff(std::string_view diff_text);

// Mail bodies are often whitespace-damaged; a line that breaks hunk framing
// ends the hunk instead of failing.
CanonicalDiff normalize_diff_lenient(std::string_view diff_text);

// Unified-diff rendering that normalize_diff maps back to the same value.
std::string render_diff(const CanonicalDiff& diff);

// Drops leading bracketed tags such as `[PATCH v3 2/7]` or `[RFC]`.
std::string strip_subject_tags(std::string_view subject);

// Returns true for lines like `Signed-off-by: ...` that maintainers append
// after list submission.
bool is_trailer_line(std::string_view line);

// Subject without tags, followed by the body with trailers removed. The body is
// cut at a `---` separator line.
std::string clean_message(std::string_view subject, std::string_view body);

Patch make_patch(PatchId id, std::string_view subject, std::string_view body,
                 const CanonicalDiff& diff, std::string author_email, Timestamp author_date);

// Stable content digest over the cleaned message tokens and canonical diff.
std::string patch_digest(const Patch& patch);

}  // namespace offlist
