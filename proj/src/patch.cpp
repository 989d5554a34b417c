#include "offlist/patch.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <optional>

#include "offlist/error.hpp"
#include "offlist/text.hpp"

namespace offlist {

std::string_view to_string(Origin origin) {
  return origin == Origin::mail ? "mail" : "commit";
}

TokenSeq::TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  ids_.reserve(tokens_.size());
  for (const auto& t : tokens_) ids_.push_back(fnv1a64(t));
}

std::weak_ordering operator<=>(const TokenSeq& a, const TokenSeq& b) {
  return std::lexicographical_compare_three_way(a.tokens_.begin(), a.tokens_.end(),
                                                b.tokens_.begin(), b.tokens_.end());
}

std::weak_ordering operator<=>(const FileChange& a, const FileChange& b) {
  auto c = std::lexicographical_compare_three_way(a.added.begin(), a.added.end(),
                                                  b.added.begin(), b.added.end());
  if (c != 0) return c;
  return std::lexicographical_compare_three_way(a.removed.begin(), a.removed.end(),
                                                b.removed.begin(), b.removed.end());
}

std::weak_ordering operator<=>(const CanonicalDiff& a, const CanonicalDiff& b) {
  auto ia = a.files.begin();
  auto ib = b.files.begin();
  for (; ia != a.files.end() && ib != b.files.end(); ++ia, ++ib) {
    if (auto c = ia->first <=> ib->first; c != 0) return c;
    if (auto c = ia->second <=> ib->second; c != 0) return c;
  }
  if (ia != a.files.end()) return std::weak_ordering::greater;
  if (ib != b.files.end()) return std::weak_ordering::less;
  return std::weak_ordering::equivalent;
}

std::vector<std::string> CanonicalDiff::affected() const {
  std::vector<std::string> out;
  out.reserve(files.size());
  for (const auto& [path, change] : files) out.push_back(path);
  return out;
}

std::size_t CanonicalDiff::line_count() const {
  std::size_t n = 0;
  for (const auto& [path, change] : files) n += change.line_count();
  return n;
}

namespace {

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c >= 0x80;
}

bool is_joiner(unsigned char c) { return c == '/' || c == '.' || c == '-'; }

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::vector<std::string> tokenize(std::string_view s, bool keep_punctuation) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  const auto at = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < n) {
    const unsigned char c = at(i);
    if (is_word_char(c)) {
      const std::size_t start = i;
      while (i < n) {
        if (is_word_char(at(i))) {
          ++i;
        } else if (is_joiner(at(i)) && i + 1 < n && is_word_char(at(i + 1))) {
          ++i;
        } else {
          break;
        }
      }
      out.push_back(to_lower_ascii(s.substr(start, i - start)));
    } else {
      if (keep_punctuation && !is_space(c) && c > 0x20 && c < 0x7F) {
        out.emplace_back(1, static_cast<char>(c));
      }
      ++i;
    }
  }
  return out;
}

std::string unquote_path(std::string_view p) {
  if (p.size() < 2 || p.front() != '"' || p.back() != '"') return std::string(p);
  std::string out;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i] != '\\' || i + 2 >= p.size()) {
      out.push_back(p[i]);
      continue;
    }
    const char e = p[++i];
    if (e >= '0' && e <= '7' && i + 2 < p.size()) {
      int v = 0;
      std::from_chars(p.data() + i, p.data() + i + 3, v, 8);
      out.push_back(static_cast<char>(v));
      i += 2;
    } else if (e == 'n') {
      out.push_back('\n');
    } else if (e == 't') {
      out.push_back('\t');
    } else {
      out.push_back(e);
    }
  }
  return out;
}

std::string strip_side_prefix(std::string path) {
  if (path.starts_with("a/") || path.starts_with("b/")) path.erase(0, 2);
  while (path.starts_with("./")) path.erase(0, 2);
  return path;
}

// Path field of a `---`/`+++` line; nullopt for /dev/null.
std::optional<std::string> header_path(std::string_view field) {
  if (const auto tab = field.find('\t'); tab != std::string_view::npos) {
    field = field.substr(0, tab);
  }
  field = trim(field);
  if (field == "/dev/null") return std::nullopt;
  return strip_side_prefix(unquote_path(field));
}

std::string git_header_post_path(std::string_view rest) {
  if (!rest.empty() && rest.front() == '"') {
    // `"a/x y" "b/x y"` or mixed quoting.
    const auto close = rest.find('"', 1);
    if (close != std::string_view::npos && close + 2 <= rest.size()) {
      return strip_side_prefix(unquote_path(trim(rest.substr(close + 1))));
    }
  }
  // Unrenamed files have identical halves: `a/P b/P`.
  if (rest.size() >= 5 && (rest.size() - 1) % 2 == 0) {
    const std::size_t half = (rest.size() - 1) / 2;
    const auto left = rest.substr(0, half);
    const auto right = rest.substr(half + 1);
    if (rest[half] == ' ' && left.size() > 2 && left.substr(2) == right.substr(2)) {
      return strip_side_prefix(std::string(right));
    }
  }
  const auto sep = rest.find(" b/");
  if (sep != std::string_view::npos) return strip_side_prefix(std::string(rest.substr(sep + 1)));
  const auto space = rest.rfind(' ');
  return strip_side_prefix(std::string(space == std::string_view::npos ? rest : rest.substr(space + 1)));
}

bool parse_range(std::string_view s, long& start, long& count) {
  const auto comma = s.find(',');
  const auto first = s.substr(0, comma);
  if (std::from_chars(first.data(), first.data() + first.size(), start).ec != std::errc{}) return false;
  if (comma == std::string_view::npos) {
    count = 1;
    return true;
  }
  const auto second = s.substr(comma + 1);
  auto [p, ec] = std::from_chars(second.data(), second.data() + second.size(), count);
  return ec == std::errc{} && p == second.data() + second.size();
}

// `@@ -a[,b] +c[,d] @@ ...`
bool parse_hunk_header(std::string_view line, long& old_count, long& new_count) {
  if (!line.starts_with("@@ -")) return false;
  const auto plus = line.find(" +", 4);
  if (plus == std::string_view::npos) return false;
  const auto close = line.find(" @@", plus + 2);
  if (close == std::string_view::npos) return false;
  long s1 = 0, s2 = 0;
  return parse_range(line.substr(4, plus - 4), s1, old_count) &&
         parse_range(line.substr(plus + 2, close - plus - 2), s2, new_count) &&
         old_count >= 0 && new_count >= 0;
}

struct Section {
  std::optional<std::string> path;
  std::optional<std::string> minus_path;
  FileChange change;
  bool git = false;
  bool seen_plus = false;
};

class DiffParser {
 public:
  explicit DiffParser(bool lenient) : lenient_(lenient) {}

  CanonicalDiff parse(std::string_view text) {
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      line_no_ = i + 1;
      handle(lines[i]);
    }
    flush();
    return std::move(result_);
  }

 private:
  [[noreturn]] void fail(std::string_view what) const {
    throw InputError(fmt::format("diff line {}: {}", line_no_, what));
  }

  void flush() {
    if (section_ && section_->path && !section_->path->empty()) {
      auto& dst = result_.files[*section_->path];
      auto& src = section_->change;
      std::move(src.added.begin(), src.added.end(), std::back_inserter(dst.added));
      std::move(src.removed.begin(), src.removed.end(), std::back_inserter(dst.removed));
    }
    section_.reset();
  }

  void payload(std::vector<TokenSeq>& into, std::string_view content) {
    auto tokens = tokenize_code(content);
    if (!tokens.empty()) into.emplace_back(std::move(tokens));
  }

  bool hunk_line(std::string_view line) {
    const char c = line.empty() ? ' ' : line.front();
    switch (c) {
      case '+':
        if (new_left_ == 0) return false;
        payload(section_->change.added, line.substr(1));
        --new_left_;
        return true;
      case '-':
        if (old_left_ == 0) return false;
        payload(section_->change.removed, line.substr(1));
        --old_left_;
        return true;
      case ' ':
        if (old_left_ == 0 || new_left_ == 0) return false;
        --old_left_;
        --new_left_;
        return true;
      case '\\':
        return true;
      default:
        return false;
    }
  }

  void handle(std::string_view line) {
    if (in_hunk_) {
      if (hunk_line(line)) {
        if (old_left_ == 0 && new_left_ == 0) in_hunk_ = false;
        return;
      }
      if (!lenient_) fail("unexpected line inside hunk");
      in_hunk_ = false;
    }

    if (line.starts_with("diff --git ")) {
      flush();
      section_.emplace();
      section_->git = true;
      section_->path = git_header_post_path(line.substr(11));
    } else if (line.starts_with("--- ")) {
      if (!(section_ && section_->git && !section_->seen_plus)) {
        flush();
        section_.emplace();
      }
      section_->minus_path = header_path(line.substr(4));
    } else if (line.starts_with("+++ ")) {
      if (!section_) section_.emplace();
      auto plus = header_path(line.substr(4));
      if (plus) {
        section_->path = std::move(plus);
      } else if (section_->minus_path) {
        section_->path = section_->minus_path;
      }
      section_->seen_plus = true;
    } else if (line.starts_with("rename to ") || line.starts_with("copy to ")) {
      if (section_) {
        section_->path = strip_side_prefix(unquote_path(trim(line.substr(line.find(" to ") + 4))));
      }
    } else if (line.starts_with("@@")) {
      if (!section_ || !section_->path) fail("hunk without file header");
      long old_count = 0;
      long new_count = 0;
      if (!parse_hunk_header(line, old_count, new_count)) fail("malformed hunk header");
      old_left_ = old_count;
      new_left_ = new_count;
      in_hunk_ = old_left_ > 0 || new_left_ > 0;
    }
    // Everything else (index, mode, similarity, binary markers, prose) carries
    // no payload; binary sections end up with empty line lists.
  }

  bool lenient_;
  CanonicalDiff result_;
  std::optional<Section> section_;
  bool in_hunk_ = false;
  long old_left_ = 0;
  long new_left_ = 0;
  std::size_t line_no_ = 0;
};

constexpr std::array<std::string_view, 13> kTrailers = {
    "signed-off-by:", "reviewed-by:",  "acked-by:",       "cc:",
    "link:",          "fixes:",        "tested-by:",      "reported-by:",
    "suggested-by:",  "co-developed-by:", "reported-and-tested-by:",
    "message-id:",    "bisected-by:"};

std::string join_tokens(const TokenSeq& seq) {
  std::string out;
  for (const auto& t : seq.tokens()) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) { return tokenize(text, false); }

std::vector<std::string> tokenize_code(std::string_view text) { return tokenize(text, true); }

CanonicalDiff normalize_diff(std::string_view diff_text) {
  return DiffParser(false).parse(diff_text);
}

CanonicalDiff normalize_diff_lenient(std::string_view diff_text) {
  return DiffParser(true).parse(diff_text);
}

std::string render_diff(const CanonicalDiff& diff) {
  std::string out;
  for (const auto& [path, change] : diff.files) {
    out += fmt::format("diff --git a/{0} b/{0}\n", path);
    if (change.line_count() == 0) continue;
    out += fmt::format("--- a/{0}\n+++ b/{0}\n@@ -1,{1} +1,{2} @@\n", path,
                       change.removed.size(), change.added.size());
    for (const auto& line : change.removed) out += "-" + join_tokens(line) + "\n";
    for (const auto& line : change.added) out += "+" + join_tokens(line) + "\n";
  }
  return out;
}

std::string strip_subject_tags(std::string_view subject) {
  std::string_view s = trim(subject);
  while (s.starts_with('[')) {
    const auto close = s.find(']');
    if (close == std::string_view::npos) break;
    s = trim(s.substr(close + 1));
  }
  return std::string(s);
}

bool is_trailer_line(std::string_view line) {
  const std::string l = to_lower_ascii(trim(line));
  return std::any_of(kTrailers.begin(), kTrailers.end(),
                     [&](std::string_view t) { return l.starts_with(t); });
}

std::string clean_message(std::string_view subject, std::string_view body) {
  std::string out = strip_subject_tags(subject);
  bool leading = true;
  for (const auto line : split_lines(body)) {
    const auto stripped = trim(line);
    if (line == "---" || line == "--- ") break;
    // `git format-patch` pseudo-headers at the top of a mail body.
    if (leading && (line.starts_with("From: ") || line.starts_with("Date: ") ||
                    line.starts_with("Subject: "))) {
      continue;
    }
    if (!stripped.empty()) leading = false;
    if (is_trailer_line(line)) continue;
    out.push_back('\n');
    out += line;
  }
  return out;
}

Patch make_patch(PatchId id, std::string_view subject, std::string_view body,
                 const CanonicalDiff& diff, std::string author_email, Timestamp author_date) {
  Patch p;
  p.id = std::move(id);
  p.message = TokenSeq(tokenize_text(clean_message(subject, body)));
  p.diff = diff;
  p.author_email = std::move(author_email);
  p.author_date = author_date;
  return p;
}

std::string patch_digest(const Patch& patch) {
  std::string material = join_tokens(patch.message);
  material.push_back('\x1e');
  material += render_diff(patch.diff);
  return sha256_hex(material);
}

}  // namespace offlist
