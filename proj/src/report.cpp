#include "offlist/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "json.hpp"
#include "offlist/error.hpp"
#include "offlist/text.hpp"

namespace offlist {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(ClusterClass cls) {
  switch (cls) {
    case ClusterClass::unintegrated: return "Unintegrated";
    case ClusterClass::integrated: return "Integrated";
    case ClusterClass::off_list: return "OffList";
  }
  return "Unknown";
}

double SummaryCounts::mapped_fraction() const {
  if (universe_commits == 0) return 0.0;
  return static_cast<double>(mapped) / static_cast<double>(universe_commits);
}

bool SummaryCounts::consistent() const {
  return mapped + raw_candidates == universe_commits && reverts + owners <= raw_candidates &&
         flagged == raw_candidates - reverts - owners;
}

SummaryCounts SummaryCounts::from_exclusions(std::size_t messages_total,
                                             std::size_t messages_with_patches,
                                             std::size_t universe_commits,
                                             std::size_t raw_candidates, std::size_t reverts,
                                             std::size_t owners) {
  SummaryCounts c;
  c.messages_total = messages_total;
  c.messages_with_patches = messages_with_patches;
  c.universe_commits = universe_commits;
  c.raw_candidates = raw_candidates;
  c.mapped = universe_commits - raw_candidates;
  c.reverts = reverts;
  c.owners = owners;
  c.flagged = raw_candidates - reverts - owners;
  return c;
}

void sort_candidates(std::vector<OffListCandidate>& candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const OffListCandidate& a, const OffListCandidate& b) {
              if (a.author_date != b.author_date) return a.author_date < b.author_date;
              return a.commit < b.commit;
            });
}

namespace {

ojson candidate_json(const OffListCandidate& c) {
  ojson j;
  j["commit"] = c.commit;
  j["cluster_id"] = c.cluster_id;
  j["class"] = std::string(to_string(ClusterClass::off_list));
  j["flagged"] = c.flagged;
  ojson exclusions = ojson::array();
  if (c.exclusions.merge) exclusions.push_back("merge");
  if (c.exclusions.out_of_window) exclusions.push_back("out_of_window");
  if (c.exclusions.revert) exclusions.push_back("revert");
  if (c.exclusions.owner) exclusions.push_back("owner");
  j["exclusions"] = exclusions;
  if (c.nearest_mail) {
    j["nearest_mail"] = {{"message_id", c.nearest_mail->message_id}, {"score", c.nearest_mail->score}};
  } else {
    j["nearest_mail"] = nullptr;
  }
  j["window_edge"] = c.window_edge;
  return j;
}

std::string dump(const ojson& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out) throw InputError(fmt::format("error writing {}", path.string()));
}

constexpr std::string_view kMessagesTotal = "messages total";
constexpr std::string_view kMessagesWithPatches = "messages with patches";
constexpr std::string_view kMailPatches = "mail patches in universe";
constexpr std::string_view kCommits = "commits in window";
constexpr std::string_view kMapped = "mapped commits";
constexpr std::string_view kFraction = "mapped fraction";
constexpr std::string_view kRaw = "raw off-list candidates";
constexpr std::string_view kReverts = "excluded reverts";
constexpr std::string_view kOwners = "excluded owner commits";
constexpr std::string_view kFlagged = "flagged for review";

}  // namespace

std::string render_candidates(const AnalysisReport& report) {
  std::string out;
  for (const auto& c : report.candidates) {
    out += dump(candidate_json(c));
    out += '\n';
  }
  return out;
}

std::string render_cluster_dump(const AnalysisReport& report) {
  std::string out;
  for (const auto& rec : report.clusters) {
    ojson j;
    j["cluster_id"] = rec.cluster.id.key;
    j["class"] = std::string(to_string(rec.cls));
    ojson members = ojson::array();
    ojson origins = ojson::array();
    for (const auto& m : rec.cluster.members) {
      members.push_back(m.key);
      origins.push_back(std::string(to_string(m.origin)));
    }
    j["members"] = members;
    j["origins"] = origins;
    out += dump(j);
    out += '\n';
  }
  return out;
}

std::string emit_summary(const AnalysisReport& report) {
  const auto& c = report.counts;
  std::string out = "offlist analysis summary\n\nconfig:\n";
  for (const auto line : split_lines(report.config_echo)) out += fmt::format("  {}\n", line);
  out += "\ncounts:\n";
  const auto row = [&](std::string_view label, const std::string& value) {
    out += fmt::format("  {:<26}{}\n", fmt::format("{}:", label), value);
  };
  row(kMessagesTotal, fmt::format("{}", c.messages_total));
  row(kMessagesWithPatches, fmt::format("{}", c.messages_with_patches));
  row(kMailPatches, fmt::format("{}", c.mail_patches));
  row(kCommits, fmt::format("{}", c.universe_commits));
  row(kMapped, fmt::format("{}", c.mapped));
  row(kFraction, fmt::format("{:.4f}", c.mapped_fraction()));
  row(kRaw, fmt::format("{}", c.raw_candidates));
  row(kReverts, fmt::format("{}", c.reverts));
  row(kOwners, fmt::format("{}", c.owners));
  row(kFlagged, fmt::format("{}", c.flagged));
  return out;
}

void emit_report(const AnalysisReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw InputError(fmt::format("cannot create output directory {}", out_dir.string()));
  }
  write_file(out_dir / "candidates.jsonl", render_candidates(report));
  write_file(out_dir / "summary.txt", emit_summary(report));
}

void write_cluster_dump(const AnalysisReport& report, const fs::path& path) {
  write_file(path, render_cluster_dump(report));
}

SummaryCounts recount(std::string_view candidates_jsonl, std::optional<std::string_view> cluster_dump) {
  SummaryCounts c;
  std::size_t line_no = 0;
  for (const auto line : split_lines(candidates_jsonl)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      ++c.raw_candidates;
      bool revert = false;
      bool owner = false;
      for (const auto& x : j.at("exclusions")) {
        revert = revert || x == "revert";
        owner = owner || x == "owner";
      }
      if (revert) {
        ++c.reverts;
      } else if (owner) {
        ++c.owners;
      }
      if (j.at("flagged").get<bool>()) ++c.flagged;
    } catch (const nlohmann::json::exception& e) {
      throw InputError(fmt::format("candidates line {}: {}", line_no, e.what()));
    }
  }
  if (cluster_dump) {
    line_no = 0;
    for (const auto line : split_lines(*cluster_dump)) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        std::size_t commits = 0;
        std::size_t mails = 0;
        for (const auto& o : j.at("origins")) {
          if (o == "commit") {
            ++commits;
          } else {
            ++mails;
          }
        }
        c.universe_commits += commits;
        c.mail_patches += mails;
        if (commits > 0 && mails > 0) c.mapped += commits;
      } catch (const nlohmann::json::exception& e) {
        throw InputError(fmt::format("cluster dump line {}: {}", line_no, e.what()));
      }
    }
  }
  return c;
}

SummaryCounts parse_summary_counts(std::string_view summary) {
  SummaryCounts c;
  const std::map<std::string_view, std::size_t SummaryCounts::*> fields = {
      {kMessagesTotal, &SummaryCounts::messages_total},
      {kMessagesWithPatches, &SummaryCounts::messages_with_patches},
      {kMailPatches, &SummaryCounts::mail_patches},
      {kCommits, &SummaryCounts::universe_commits},
      {kMapped, &SummaryCounts::mapped},
      {kRaw, &SummaryCounts::raw_candidates},
      {kReverts, &SummaryCounts::reverts},
      {kOwners, &SummaryCounts::owners},
      {kFlagged, &SummaryCounts::flagged}};
  for (const auto line : split_lines(summary)) {
    const auto t = trim(line);
    const auto colon = t.find(':');
    if (colon == std::string_view::npos) continue;
    const auto it = fields.find(t.substr(0, colon));
    if (it == fields.end()) continue;
    const auto v = trim(t.substr(colon + 1));
    std::size_t value = 0;
    if (std::from_chars(v.data(), v.data() + v.size(), value).ec != std::errc{}) {
      throw InputError(fmt::format("summary: bad value in '{}'", t));
    }
    c.*(it->second) = value;
  }
  return c;
}

}  // namespace offlist
