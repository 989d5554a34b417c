#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offlist/patch.hpp"
#include "offlist/timeutil.hpp"

namespace offlist {

struct MailArtifact {
  std::string message_id;  // without angle brackets
  std::string subject;
  std::string sender_name;
  std::string sender_email;
  Timestamp sent_at{};
  std::optional<std::string> in_reply_to;
  std::vector<std::string> references;
  std::string body;
  std::string list_name;

  friend bool operator==(const MailArtifact&, const MailArtifact&) = default;
};

enum class NoiseReason { patch, cover_letter, pull_request, bot, backport_notice, no_diff, discussion_reply };

std::string_view to_string(NoiseReason reason);

struct NoiseVerdict {
  bool kept = false;
  NoiseReason reason = NoiseReason::no_diff;
};

// Every pattern is configurable; defaults cover the Linux list conventions.
struct NoiseRules {
  std::vector<std::string> bot_patterns{"*bot@*", "*@syzkaller.appspotmail.com"};
  std::vector<std::string> pull_request_subject_markers{"[GIT PULL]"};
  // Matched against the start of each body line.
  std::vector<std::string> pull_request_body_markers{"The following changes since commit"};
  // Stable-queue notices: `Patch "<subject>" has been added to ...`.
  std::string backport_prefix = "Patch \"";
  std::string backport_infix = "\" has been added to";
  // ECMAScript regex; a match without a diff marks a cover letter.
  std::string cover_letter_regex = R"(\[[^\]]*\b0+/[0-9]+\])";
};

struct MailSource {
  enum class Kind { mbox, maildir };
  Kind kind = Kind::mbox;
  std::filesystem::path path;
  std::string list_name;
};

struct MailCorpus {
  std::vector<MailArtifact> mails;  // sorted by message_id, unique
  std::size_t skipped = 0;
  std::vector<std::string> diagnostics;
};

// Parses one RFC 5322 message. Returns nullopt (with a diagnostic) when the
// message lacks a Message-ID, a usable Date, or header framing.
std::optional<MailArtifact> parse_message(std::string_view raw, std::string_view list_name,
                                          std::string* diagnostic = nullptr);

// Splits an mbox stream on `From ` separator lines and parses every message.
// `>From ` escapes (mboxrd) are undone. Not deduplicated.
MailCorpus parse_mbox(std::string_view data, std::string_view list_name);

// Parses every source (in parallel, one task per file) and deduplicates by
// message_id. Among duplicates the copy with the lexicographically smallest
// list_name wins. Throws InputError if a source cannot be read.
MailCorpus parse_mail_corpus(std::span<const MailSource> sources);

// Patch carried in the mail body, if it contains a unified diff.
std::optional<Patch> extract_mail_patch(const MailArtifact& mail);

NoiseVerdict filter_mail_noise(const MailArtifact& mail, const std::optional<Patch>& patch,
                               const NoiseRules& rules = {});

struct SeriesMember {
  std::string message_id;
  NoiseReason reason = NoiseReason::no_diff;
};

struct SeriesGroup {
  std::string root_id;
  std::optional<std::string> cover_letter;
  std::vector<SeriesMember> members;  // ordered by (sent_at, message_id)
};

// Groups mails connected through In-Reply-To/References, including through
// referenced messages missing from the corpus. Sorted by root_id.
std::vector<SeriesGroup> group_series(std::span<const MailArtifact> mails,
                                      const NoiseRules& rules = {},
                                      std::vector<std::string>* diagnostics = nullptr);

// Newline-delimited JSON, one MailArtifact per line.
void write_mails(std::ostream& out, std::span<const MailArtifact> mails);
std::vector<MailArtifact> load_mails(std::istream& in);
std::vector<MailArtifact> load_mails_file(const std::filesystem::path& path);

// Decoders exposed for testing.
std::string decode_quoted_printable(std::string_view text, bool header_mode = false);
std::string decode_base64(std::string_view text);
std::string decode_header_words(std::string_view value);

}  // namespace offlist
