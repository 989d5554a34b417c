#include "offlist/mail.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "offlist/clustering.hpp"
#include "offlist/error.hpp"
#include "offlist/text.hpp"

namespace offlist {

namespace fs = std::filesystem;

std::string_view to_string(NoiseReason reason) {
  switch (reason) {
    case NoiseReason::patch: return "patch";
    case NoiseReason::cover_letter: return "cover_letter";
    case NoiseReason::pull_request: return "pull_request";
    case NoiseReason::bot: return "bot";
    case NoiseReason::backport_notice: return "backport_notice";
    case NoiseReason::no_diff: return "no_diff";
    case NoiseReason::discussion_reply: return "discussion_reply";
  }
  return "unknown";
}

namespace {

using HeaderList = std::vector<std::pair<std::string, std::string>>;

struct Entity {
  HeaderList headers;
  std::string_view body;
};

std::optional<std::string> header(const HeaderList& headers, std::string_view name) {
  const std::string wanted = to_lower_ascii(name);
  for (const auto& [key, value] : headers) {
    if (key == wanted) return value;
  }
  return std::nullopt;
}

// Splits header block and body. Returns false when there is no usable header.
bool split_entity(std::string_view raw, Entity& out, bool require_headers) {
  std::size_t pos = 0;
  std::size_t body_start = raw.size();
  std::vector<std::string_view> header_lines;
  while (pos < raw.size()) {
    std::size_t end = raw.find('\n', pos);
    const std::size_t next = end == std::string_view::npos ? raw.size() : end + 1;
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = raw.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      body_start = next;
      break;
    }
    header_lines.push_back(line);
    pos = next;
  }
  out.body = body_start < raw.size() ? raw.substr(body_start) : std::string_view{};

  for (const auto line : header_lines) {
    if ((line.front() == ' ' || line.front() == '\t') && !out.headers.empty()) {
      out.headers.back().second += ' ';
      out.headers.back().second += trim(line);
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) continue;
    const auto name = trim(line.substr(0, colon));
    if (name.find(' ') != std::string_view::npos) continue;
    out.headers.emplace_back(to_lower_ascii(name), std::string(trim(line.substr(colon + 1))));
  }
  return !require_headers || !out.headers.empty();
}

struct ContentType {
  std::string type = "text/plain";
  std::string charset;
  std::string boundary;
};

ContentType parse_content_type(const std::optional<std::string>& value) {
  ContentType ct;
  if (!value) return ct;
  std::string_view v = *value;
  const auto semi = v.find(';');
  const auto main = trim(v.substr(0, semi));
  if (!main.empty()) ct.type = to_lower_ascii(main);
  std::string_view rest = semi == std::string_view::npos ? std::string_view{} : v.substr(semi + 1);
  while (!rest.empty()) {
    const auto next = rest.find(';');
    const auto param = trim(rest.substr(0, next));
    const auto eq = param.find('=');
    if (eq != std::string_view::npos) {
      const std::string key = to_lower_ascii(trim(param.substr(0, eq)));
      std::string_view val = trim(param.substr(eq + 1));
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
        val = val.substr(1, val.size() - 2);
      }
      if (key == "charset") ct.charset = to_lower_ascii(val);
      if (key == "boundary") ct.boundary = std::string(val);
    }
    if (next == std::string_view::npos) break;
    rest = rest.substr(next + 1);
  }
  return ct;
}

std::string to_utf8(std::string_view bytes, std::string_view charset) {
  if (charset == "iso-8859-1" || charset == "latin1" || charset == "iso-8859-15" ||
      charset == "windows-1252" || charset == "cp1252" || charset == "latin-1") {
    return latin1_to_utf8(bytes);
  }
  return sanitize_utf8(bytes);
}

std::string decode_transfer(std::string_view body, const std::optional<std::string>& encoding) {
  const std::string enc = encoding ? to_lower_ascii(trim(*encoding)) : std::string{};
  if (enc == "quoted-printable") return decode_quoted_printable(body);
  if (enc == "base64") return decode_base64(body);
  return std::string(body);
}

std::vector<std::string_view> split_multipart(std::string_view body, std::string_view boundary) {
  std::vector<std::string_view> parts;
  const std::string delimiter = "--" + std::string(boundary);
  std::size_t pos = 0;
  std::optional<std::size_t> part_start;
  while (pos <= body.size()) {
    std::size_t end = body.find('\n', pos);
    const std::size_t next = end == std::string_view::npos ? body.size() + 1 : end + 1;
    if (end == std::string_view::npos) end = body.size();
    std::string_view line = body.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.starts_with(delimiter)) {
      const auto tail = trim(line.substr(delimiter.size()));
      if (part_start) parts.push_back(body.substr(*part_start, pos - *part_start));
      if (tail == "--") return parts;
      part_start = next <= body.size() ? next : body.size();
    }
    pos = next;
  }
  if (part_start && *part_start < body.size()) parts.push_back(body.substr(*part_start));
  return parts;
}

std::optional<std::string> find_text(const Entity& entity, bool plain_only, int depth) {
  const auto ct = parse_content_type(header(entity.headers, "content-type"));
  if (ct.type.starts_with("multipart/")) {
    if (depth > 8 || ct.boundary.empty()) return std::nullopt;
    const auto parts = split_multipart(entity.body, ct.boundary);
    for (const bool plain : {true, false}) {
      if (plain_only && !plain) break;
      for (const auto part : parts) {
        Entity sub;
        split_entity(part, sub, false);
        if (auto text = find_text(sub, plain, depth + 1)) return text;
      }
    }
    return std::nullopt;
  }
  const bool acceptable = plain_only ? ct.type == "text/plain" : ct.type.starts_with("text/");
  if (!acceptable) return std::nullopt;
  const auto decoded = decode_transfer(entity.body, header(entity.headers, "content-transfer-encoding"));
  return to_utf8(decoded, ct.charset);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : trim(s)) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> angle_ids(std::string_view value) {
  std::vector<std::string> ids;
  std::size_t pos = 0;
  while (true) {
    const auto open = value.find('<', pos);
    if (open == std::string_view::npos) break;
    const auto close = value.find('>', open);
    if (close == std::string_view::npos) break;
    const auto id = trim(value.substr(open + 1, close - open - 1));
    if (!id.empty()) ids.emplace_back(id);
    pos = close + 1;
  }
  if (ids.empty()) {
    std::istringstream words{std::string(value)};
    std::string w;
    while (words >> w) ids.push_back(w);
  }
  return ids;
}

void parse_sender(std::string_view from, std::string& name, std::string& email) {
  const auto open = from.rfind('<');
  const auto close = from.rfind('>');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    email = std::string(trim(from.substr(open + 1, close - open - 1)));
    std::string_view n = trim(from.substr(0, open));
    if (n.size() >= 2 && n.front() == '"' && n.back() == '"') n = n.substr(1, n.size() - 2);
    name = std::string(n);
    return;
  }
  const auto paren = from.find('(');
  if (paren != std::string_view::npos) {
    email = std::string(trim(from.substr(0, paren)));
    const auto end = from.rfind(')');
    name = std::string(trim(from.substr(paren + 1, end == std::string_view::npos ? std::string_view::npos : end - paren - 1)));
    return;
  }
  email = std::string(trim(from));
  name.clear();
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && to_lower_ascii(s.substr(0, prefix.size())) == to_lower_ascii(prefix);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string decode_quoted_printable(std::string_view text, bool header_mode) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (header_mode && c == '_') {
      out.push_back(' ');
    } else if (c == '=') {
      if (i + 1 < text.size() && text[i + 1] == '\n') {
        i += 1;  // soft line break
      } else if (i + 2 < text.size() && text[i + 1] == '\r' && text[i + 2] == '\n') {
        i += 2;
      } else if (i + 2 < text.size() && hex_value(text[i + 1]) >= 0 && hex_value(text[i + 2]) >= 0) {
        out.push_back(static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2])));
        i += 2;
      } else {
        out.push_back(c);
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string decode_base64(std::string_view text) {
  // Keep only alphabet characters so that stray garbage does not abort the
  // whole part; EVP handles line breaks and padding.
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' ||
        c == '/' || c == '=') {
      clean.push_back(c);
    }
  }
  // Drop a dangling partial quantum.
  clean.resize(clean.size() - clean.size() % 4);
  std::string out(clean.size() / 4 * 3 + 3, '\0');
  EVP_ENCODE_CTX* ctx = EVP_ENCODE_CTX_new();
  EVP_DecodeInit(ctx);
  int written = 0;
  int final_written = 0;
  const int rc = EVP_DecodeUpdate(ctx, reinterpret_cast<unsigned char*>(out.data()), &written,
                                  reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
  if (rc >= 0) {
    EVP_DecodeFinal(ctx, reinterpret_cast<unsigned char*>(out.data()) + written, &final_written);
  } else {
    written = 0;
  }
  EVP_ENCODE_CTX_free(ctx);
  out.resize(static_cast<std::size_t>(written + final_written));
  return out;
}

std::string decode_header_words(std::string_view value) {
  std::string out;
  std::size_t pos = 0;
  bool previous_encoded = false;
  std::string pending_space;
  while (pos < value.size()) {
    const auto start = value.find("=?", pos);
    if (start == std::string_view::npos) {
      out += pending_space;
      out.append(value.substr(pos));
      break;
    }
    const auto q1 = value.find('?', start + 2);
    const auto q2 = q1 == std::string_view::npos ? q1 : value.find('?', q1 + 1);
    const auto end = q2 == std::string_view::npos ? q2 : value.find("?=", q2 + 1);
    if (end == std::string_view::npos) {
      out += pending_space;
      out.append(value.substr(pos));
      break;
    }
    const auto between = value.substr(pos, start - pos);
    if (!(previous_encoded && trim(between).empty())) {
      out += pending_space;
      out.append(between);
    }
    pending_space.clear();
    std::string charset = to_lower_ascii(value.substr(start + 2, q1 - start - 2));
    if (const auto star = charset.find('*'); star != std::string::npos) charset.resize(star);
    const char enc = static_cast<char>(std::tolower(static_cast<unsigned char>(value[q1 + 1])));
    const auto payload = value.substr(q2 + 1, end - q2 - 1);
    std::string decoded;
    if (enc == 'b') {
      decoded = decode_base64(payload);
    } else {
      decoded = decode_quoted_printable(payload, true);
    }
    out += to_utf8(decoded, charset);
    previous_encoded = true;
    pos = end + 2;
  }
  return sanitize_utf8(out);
}

std::optional<MailArtifact> parse_message(std::string_view raw, std::string_view list_name,
                                          std::string* diagnostic) {
  const auto reject = [&](std::string why) -> std::optional<MailArtifact> {
    if (diagnostic) *diagnostic = std::move(why);
    return std::nullopt;
  };
  Entity entity;
  if (!split_entity(raw, entity, true)) return reject("no header block");

  MailArtifact mail;
  mail.list_name = std::string(list_name);
  const auto mid = header(entity.headers, "message-id");
  if (!mid) return reject("missing Message-ID");
  const auto ids = angle_ids(*mid);
  if (ids.empty()) return reject("empty Message-ID");
  mail.message_id = ids.front();

  const auto date = header(entity.headers, "date");
  if (!date) return reject(fmt::format("{}: missing Date", mail.message_id));
  const auto sent = parse_mail_date(*date);
  if (!sent) return reject(fmt::format("{}: unparseable Date '{}'", mail.message_id, *date));
  mail.sent_at = *sent;

  mail.subject = collapse_whitespace(decode_header_words(header(entity.headers, "subject").value_or("")));
  parse_sender(decode_header_words(header(entity.headers, "from").value_or("")), mail.sender_name,
               mail.sender_email);
  if (const auto irt = header(entity.headers, "in-reply-to")) {
    const auto parents = angle_ids(*irt);
    if (!parents.empty()) mail.in_reply_to = parents.front();
  }
  if (const auto refs = header(entity.headers, "references")) mail.references = angle_ids(*refs);
  mail.body = find_text(entity, false, 0).value_or(std::string{});
  return mail;
}

MailCorpus parse_mbox(std::string_view data, std::string_view list_name) {
  MailCorpus corpus;
  std::vector<std::string> messages;
  std::string current;
  bool have_current = false;
  bool previous_blank = true;
  std::size_t pos = 0;
  while (pos < data.size()) {
    std::size_t end = data.find('\n', pos);
    const std::size_t next = end == std::string_view::npos ? data.size() : end + 1;
    std::string_view line = data.substr(pos, next - pos);
    pos = next;
    if (previous_blank && line.starts_with("From ")) {
      if (have_current) messages.push_back(std::move(current));
      current.clear();
      have_current = true;
      previous_blank = false;
      continue;
    }
    std::string_view content = line;
    while (!content.empty() && (content.back() == '\n' || content.back() == '\r')) content.remove_suffix(1);
    previous_blank = content.empty();
    // mboxrd: `>From `, `>>From ` ... lose one quoting level.
    const auto gt = line.find_first_not_of('>');
    if (gt != std::string_view::npos && gt > 0 && line.substr(gt).starts_with("From ")) {
      line.remove_prefix(1);
    }
    if (!have_current && !trim(line).empty()) have_current = true;
    current.append(line);
  }
  if (have_current) messages.push_back(std::move(current));

  for (const auto& raw : messages) {
    std::string why;
    if (auto mail = parse_message(raw, list_name, &why)) {
      corpus.mails.push_back(std::move(*mail));
    } else {
      ++corpus.skipped;
      corpus.diagnostics.push_back(fmt::format("{}: skipped message: {}", list_name, why));
    }
  }
  return corpus;
}

MailCorpus parse_mail_corpus(std::span<const MailSource> sources) {
  std::vector<MailCorpus> partial(sources.size());
  std::vector<std::string> errors(sources.size());
  const auto n = static_cast<std::ptrdiff_t>(sources.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto& source = sources[static_cast<std::size_t>(k)];
    auto& out = partial[static_cast<std::size_t>(k)];
    try {
      if (source.kind == MailSource::Kind::mbox) {
        out = parse_mbox(read_file(source.path), source.list_name);
      } else {
        if (!fs::is_directory(source.path)) {
          throw InputError(fmt::format("maildir {} is not a directory", source.path.string()));
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(source.path)) {
          if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
          std::string why;
          if (auto mail = parse_message(read_file(file), source.list_name, &why)) {
            out.mails.push_back(std::move(*mail));
          } else {
            ++out.skipped;
            out.diagnostics.push_back(fmt::format("{}: skipped message: {}", file.string(), why));
          }
        }
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw InputError(e);
  }

  MailCorpus corpus;
  for (auto& p : partial) {
    corpus.skipped += p.skipped;
    std::move(p.diagnostics.begin(), p.diagnostics.end(), std::back_inserter(corpus.diagnostics));
    std::move(p.mails.begin(), p.mails.end(), std::back_inserter(corpus.mails));
  }
  const auto key = [](const MailArtifact& m) {
    return std::tie(m.message_id, m.list_name, m.subject, m.body, m.sender_email, m.sent_at);
  };
  std::sort(corpus.mails.begin(), corpus.mails.end(),
            [&](const MailArtifact& a, const MailArtifact& b) { return key(a) < key(b); });
  corpus.mails.erase(std::unique(corpus.mails.begin(), corpus.mails.end(),
                                 [](const MailArtifact& a, const MailArtifact& b) {
                                   return a.message_id == b.message_id;
                                 }),
                     corpus.mails.end());
  return corpus;
}

std::optional<Patch> extract_mail_patch(const MailArtifact& mail) {
  const auto lines = split_lines(mail.body);
  std::optional<std::size_t> diff_line;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].starts_with("diff --git ") ||
        (lines[i].starts_with("--- ") && i + 1 < lines.size() && lines[i + 1].starts_with("+++ "))) {
      diff_line = i;
      break;
    }
  }
  if (!diff_line) return std::nullopt;
  // Offset of the diff start within the body.
  const std::size_t offset = static_cast<std::size_t>(lines[*diff_line].data() - mail.body.data());
  const std::string_view body = mail.body;
  CanonicalDiff diff;
  try {
    diff = normalize_diff_lenient(body.substr(offset));
  } catch (const InputError&) {
    return std::nullopt;
  }
  if (diff.empty()) return std::nullopt;
  return make_patch(PatchId{mail.message_id, Origin::mail}, mail.subject, body.substr(0, offset),
                    diff, mail.sender_email, mail.sent_at);
}

NoiseVerdict filter_mail_noise(const MailArtifact& mail, const std::optional<Patch>& patch,
                               const NoiseRules& rules) {
  const std::string subject_lower = to_lower_ascii(mail.subject);
  for (const auto& marker : rules.pull_request_subject_markers) {
    if (subject_lower.find(to_lower_ascii(marker)) != std::string::npos) {
      return {false, NoiseReason::pull_request};
    }
  }
  if (!rules.pull_request_body_markers.empty()) {
    for (const auto line : split_lines(mail.body)) {
      for (const auto& marker : rules.pull_request_body_markers) {
        if (line.starts_with(marker)) return {false, NoiseReason::pull_request};
      }
    }
  }
  if (glob_match_any(rules.bot_patterns, mail.sender_email)) return {false, NoiseReason::bot};
  if (!rules.backport_prefix.empty()) {
    const auto p = mail.subject.find(rules.backport_prefix);
    if (p != std::string::npos &&
        mail.subject.find(rules.backport_infix, p + rules.backport_prefix.size()) != std::string::npos) {
      return {false, NoiseReason::backport_notice};
    }
  }
  if (patch) return {true, NoiseReason::patch};
  if (!rules.cover_letter_regex.empty() &&
      std::regex_search(mail.subject, std::regex(rules.cover_letter_regex))) {
    return {false, NoiseReason::cover_letter};
  }
  if (mail.in_reply_to || starts_with_ci(mail.subject, "re:")) {
    return {false, NoiseReason::discussion_reply};
  }
  return {false, NoiseReason::no_diff};
}

std::vector<SeriesGroup> group_series(std::span<const MailArtifact> mails, const NoiseRules& rules,
                                      std::vector<std::string>* diagnostics) {
  std::map<std::string, std::size_t> node_of;
  DisjointSet sets;
  const auto node = [&](const std::string& id) {
    auto [it, inserted] = node_of.try_emplace(id, 0);
    if (inserted) it->second = sets.add();
    return it->second;
  };
  std::map<std::string, std::size_t> mail_index;
  for (std::size_t i = 0; i < mails.size(); ++i) {
    node(mails[i].message_id);
    mail_index.emplace(mails[i].message_id, i);
  }
  for (const auto& m : mails) {
    const auto self = node(m.message_id);
    if (m.in_reply_to) sets.unite(self, node(*m.in_reply_to));
    for (const auto& r : m.references) sets.unite(self, node(r));
  }

  // Parent inside the corpus: In-Reply-To, else the last known reference.
  const auto parent_of = [&](const MailArtifact& m) -> std::optional<std::size_t> {
    if (m.in_reply_to) {
      if (auto it = mail_index.find(*m.in_reply_to); it != mail_index.end()) return it->second;
    }
    for (auto r = m.references.rbegin(); r != m.references.rend(); ++r) {
      if (auto it = mail_index.find(*r); it != mail_index.end()) return it->second;
    }
    return std::nullopt;
  };
  std::vector<std::optional<std::size_t>> parent(mails.size());
  for (std::size_t i = 0; i < mails.size(); ++i) {
    parent[i] = parent_of(mails[i]);
    if (parent[i] == i) parent[i].reset();
  }
  // Break cycles: walk each parent chain; an edge back into the current walk is dropped.
  std::vector<int> state(mails.size(), 0);  // 0 new, 1 on stack, 2 done
  for (std::size_t start = 0; start < mails.size(); ++start) {
    std::vector<std::size_t> walk;
    std::size_t v = start;
    while (state[v] == 0) {
      state[v] = 1;
      walk.push_back(v);
      if (!parent[v]) break;
      const std::size_t p = *parent[v];
      if (state[p] == 1) {
        if (diagnostics) {
          diagnostics->push_back(fmt::format("reference cycle: {} -> {} ignored", mails[v].message_id,
                                             mails[p].message_id));
        }
        parent[v].reset();
        break;
      }
      v = p;
    }
    for (std::size_t w : walk) state[w] = 2;
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < mails.size(); ++i) groups[sets.find(node(mails[i].message_id))].push_back(i);

  std::vector<SeriesGroup> out;
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(mails[a].sent_at, mails[a].message_id) < std::tie(mails[b].sent_at, mails[b].message_id);
    });
    SeriesGroup g;
    for (std::size_t i : members) {
      const auto verdict = filter_mail_noise(mails[i], extract_mail_patch(mails[i]), rules);
      g.members.push_back({mails[i].message_id, verdict.reason});
      if (verdict.reason == NoiseReason::cover_letter && !g.cover_letter) g.cover_letter = mails[i].message_id;
      if (!parent[i] && g.root_id.empty()) g.root_id = mails[i].message_id;
    }
    if (g.root_id.empty()) g.root_id = g.members.front().message_id;
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(),
            [](const SeriesGroup& a, const SeriesGroup& b) { return a.root_id < b.root_id; });
  return out;
}

void write_mails(std::ostream& out, std::span<const MailArtifact> mails) {
  for (const auto& m : mails) {
    nlohmann::ordered_json j;
    j["message_id"] = m.message_id;
    j["subject"] = m.subject;
    j["sender_name"] = m.sender_name;
    j["sender_email"] = m.sender_email;
    j["sent_at"] = format_rfc3339(m.sent_at);
    j["in_reply_to"] = m.in_reply_to ? nlohmann::ordered_json(*m.in_reply_to) : nlohmann::ordered_json(nullptr);
    j["references"] = m.references;
    j["body"] = m.body;
    j["list_name"] = m.list_name;
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

std::vector<MailArtifact> load_mails(std::istream& in) {
  std::vector<MailArtifact> mails;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MailArtifact m;
      m.message_id = j.at("message_id").get<std::string>();
      m.subject = j.at("subject").get<std::string>();
      m.sender_name = j.at("sender_name").get<std::string>();
      m.sender_email = j.at("sender_email").get<std::string>();
      m.sent_at = parse_rfc3339(j.at("sent_at").get<std::string>());
      if (!j.at("in_reply_to").is_null()) m.in_reply_to = j.at("in_reply_to").get<std::string>();
      m.references = j.at("references").get<std::vector<std::string>>();
      m.body = j.at("body").get<std::string>();
      m.list_name = j.at("list_name").get<std::string>();
      if (m.message_id.empty()) throw InputError("empty message_id");
      mails.push_back(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(fmt::format("mail export line {}: {}", line_no, e.what()));
    } catch (const InputError& e) {
      throw InputError(fmt::format("mail export line {}: {}", line_no, e.what()));
    }
  }
  return mails;
}

std::vector<MailArtifact> load_mails_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read mail export {}", path.string()));
  return load_mails(in);
}

}  // namespace offlist
