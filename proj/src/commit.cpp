#include "offlist/commit.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "offlist/error.hpp"
#include "offlist/text.hpp"

namespace offlist {

using nlohmann::json;

bool is_valid_commit_hash(std::string_view hash) {
  if (hash.size() != 40) return false;
  return std::all_of(hash.begin(), hash.end(),
                     [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

namespace {

const json& field(const json& record, const char* name, std::size_t line_no) {
  const auto it = record.find(name);
  if (it == record.end()) throw InputError(fmt::format("commit export line {}: missing field '{}'", line_no, name));
  return *it;
}

std::string string_field(const json& record, const char* name, std::size_t line_no) {
  const auto& v = field(record, name, line_no);
  if (!v.is_string()) throw InputError(fmt::format("commit export line {}: field '{}' must be a string", line_no, name));
  return v.get<std::string>();
}

Timestamp date_field(const json& record, const char* name, std::size_t line_no) {
  const auto text = string_field(record, name, line_no);
  try {
    return parse_rfc3339(text);
  } catch (const InputError& e) {
    throw InputError(fmt::format("commit export line {}: {}", line_no, e.what()));
  }
}

Commit parse_record(std::string_view line, std::size_t line_no) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("commit export line {}: {}", line_no, e.what()));
  }
  if (!record.is_object()) throw InputError(fmt::format("commit export line {}: not a JSON object", line_no));

  Commit c;
  c.hash = string_field(record, "hash", line_no);
  if (!is_valid_commit_hash(c.hash)) {
    throw InputError(fmt::format("commit export line {}: invalid hash '{}'", line_no, c.hash));
  }
  c.author_name = string_field(record, "author_name", line_no);
  c.author_email = string_field(record, "author_email", line_no);
  c.author_date = date_field(record, "author_date", line_no);
  c.commit_date = date_field(record, "commit_date", line_no);
  c.subject = string_field(record, "subject", line_no);
  c.body = string_field(record, "body", line_no);
  const auto& parents = field(record, "parents", line_no);
  if (!parents.is_array()) throw InputError(fmt::format("commit export line {}: field 'parents' must be an array", line_no));
  for (const auto& p : parents) {
    if (!p.is_string() || !is_valid_commit_hash(p.get<std::string>())) {
      throw InputError(fmt::format("commit export line {}: invalid parent hash", line_no));
    }
    c.parents.push_back(p.get<std::string>());
  }
  c.diff_text = string_field(record, "diff", line_no);
  return c;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

}  // namespace

std::vector<Commit> load_commits(std::istream& in) {
  std::vector<Commit> commits;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Commit c = parse_record(line, line_no);
    if (!seen.insert(c.hash).second) {
      throw InputError(fmt::format("commit export line {}: duplicate hash {}", line_no, c.hash));
    }
    commits.push_back(std::move(c));
  }
  if (in.bad()) throw InputError("error reading commit export");
  return commits;
}

std::vector<Commit> load_commits_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read commit export {}", path.string()));
  return load_commits(in);
}

void write_commits(std::ostream& out, std::span<const Commit> commits) {
  for (const auto& c : commits) {
    nlohmann::ordered_json record;
    record["hash"] = c.hash;
    record["author_name"] = c.author_name;
    record["author_email"] = c.author_email;
    record["author_date"] = format_rfc3339(c.author_date);
    record["commit_date"] = format_rfc3339(c.commit_date);
    record["subject"] = c.subject;
    record["body"] = c.body;
    record["parents"] = c.parents;
    record["diff"] = c.diff_text;
    out << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<Commit> export_repository(const std::filesystem::path& repo) {
  const std::string command = fmt::format(
      "git -C {} log --no-color --no-ext-diff -M -p --encoding=UTF-8 "
      "--format='%x1e%H%x1f%P%x1f%an%x1f%ae%x1f%aI%x1f%cI%x1f%s%x1f%b%x1f' 2>/dev/null",
      shell_quote(repo.string()));
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(::popen(command.c_str(), "r"), ::pclose);
  if (!pipe) throw InputError(fmt::format("cannot run git in {}", repo.string()));
  std::string output;
  char buffer[65536];
  std::size_t n = 0;
  while ((n = std::fread(buffer, 1, sizeof buffer, pipe.get())) > 0) output.append(buffer, n);
  const int status = ::pclose(pipe.release());
  if (status != 0) throw InputError(fmt::format("git log failed in {}", repo.string()));

  std::vector<Commit> commits;
  std::string_view rest = output;
  while (!rest.empty()) {
    const auto start = rest.find('\x1e');
    if (start == std::string_view::npos) break;
    rest.remove_prefix(start + 1);
    const auto stop = rest.find('\x1e');
    const std::string_view record = rest.substr(0, stop);
    rest = stop == std::string_view::npos ? std::string_view{} : rest.substr(stop);

    std::vector<std::string_view> fields;
    std::string_view r = record;
    for (int i = 0; i < 8; ++i) {
      const auto sep = r.find('\x1f');
      if (sep == std::string_view::npos) throw InputError("unexpected git log output");
      fields.push_back(r.substr(0, sep));
      r.remove_prefix(sep + 1);
    }
    Commit c;
    c.hash = std::string(fields[0]);
    std::istringstream parents{std::string(fields[1])};
    for (std::string p; parents >> p;) c.parents.push_back(p);
    c.author_name = sanitize_utf8(fields[2]);
    c.author_email = sanitize_utf8(fields[3]);
    c.author_date = parse_rfc3339(fields[4]);
    c.commit_date = parse_rfc3339(fields[5]);
    c.subject = sanitize_utf8(fields[6]);
    std::string_view body = fields[7];
    while (!body.empty() && body.back() == '\n') body.remove_suffix(1);
    c.body = sanitize_utf8(body);
    while (!r.empty() && r.front() == '\n') r.remove_prefix(1);
    c.diff_text = sanitize_utf8(r);
    commits.push_back(std::move(c));
  }
  return commits;
}

Patch extract_commit_patch(const Commit& commit) {
  return make_patch(PatchId{commit.hash, Origin::commit}, commit.subject, commit.body,
                    normalize_diff(commit.diff_text), commit.author_email, commit.author_date);
}

bool is_revert(const Commit& commit) {
  return strip_subject_tags(commit.subject).starts_with("Revert \"");
}

bool is_owner_commit(const Commit& commit, std::span<const std::string> owners) {
  return glob_match_any(owners, commit.author_email);
}

bool in_author_window(const Commit& commit, const TimeWindow& window) {
  return window.start <= commit.author_date && commit.author_date < window.end;
}

CommitExclusion evaluate_exclusions(const Commit& commit, std::span<const std::string> owners,
                                    const TimeWindow& window) {
  CommitExclusion x;
  x.merge = commit.is_merge();
  x.out_of_window = !in_author_window(commit, window);
  x.revert = is_revert(commit);
  x.owner = is_owner_commit(commit, owners);
  return x;
}

}  // namespace offlist
