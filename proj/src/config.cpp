#include "offlist/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include "offlist/error.hpp"
#include "offlist/text.hpp"

namespace offlist {

namespace pt = boost::property_tree;

TimeWindow AnalysisConfig::window() const {
  TimeWindow w;
  if (since) w.start = *since;
  if (until) w.end = *until;
  return w;
}

namespace {

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    const auto item = trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out;
}

double parse_number(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto v = trim(value);
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
  }
  return out;
}

Timestamp parse_time(const std::string& key, const std::string& value) {
  try {
    return parse_rfc3339(trim(value));
  } catch (const InputError& e) {
    throw ConfigError(fmt::format("{}: {}", key, e.what()));
  }
}

}  // namespace

AnalysisConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  AnalysisConfig config;
  for (const auto& [section, entries] : tree) {
    if (!entries.data().empty()) {
      throw ConfigError(fmt::format("config key '{}' must be inside a section", section));
    }
    for (const auto& [key, node] : entries) {
      const std::string name = section + "." + key;
      const std::string value = node.data();
      if (name == "similarity.message_weight") {
        config.similarity.message_weight = parse_number(name, value);
      } else if (name == "similarity.threshold") {
        config.similarity.threshold = parse_number(name, value);
      } else if (name == "filters.bot_patterns") {
        config.noise.bot_patterns = split_list(value);
      } else if (name == "filters.pull_request_subject") {
        config.noise.pull_request_subject_markers = split_list(value);
      } else if (name == "filters.pull_request_body") {
        config.noise.pull_request_body_markers = split_list(value);
      } else if (name == "filters.backport_prefix") {
        config.noise.backport_prefix = value;
      } else if (name == "filters.backport_infix") {
        config.noise.backport_infix = value;
      } else if (name == "filters.cover_letter_regex") {
        config.noise.cover_letter_regex = value;
      } else if (name == "window.since") {
        config.since = parse_time(name, value);
      } else if (name == "window.until") {
        config.until = parse_time(name, value);
      } else if (name == "window.edge_margin_days") {
        const double days = parse_number(name, value);
        if (days < 0 || days != static_cast<double>(static_cast<long>(days))) {
          throw ConfigError(fmt::format("{}: expected a non-negative integer", name));
        }
        config.window_edge_margin = std::chrono::days{static_cast<long>(days)};
      } else if (name == "owners.emails") {
        config.owners = split_list(value);
      } else {
        throw ConfigError(fmt::format("unknown config key '{}'", name));
      }
    }
  }
  validate(config);
  return config;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> load_owner_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read owners file {}", path.string()));
  std::vector<std::string> owners;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    owners.emplace_back(t);
  }
  return owners;
}

void validate(const AnalysisConfig& config) {
  validate(config.similarity);
  if (config.since && config.until && !(*config.since < *config.until)) {
    throw ConfigError("window.since must be earlier than window.until");
  }
  if (config.window_edge_margin.count() < 0) throw ConfigError("window.edge_margin_days must be >= 0");
  try {
    std::regex check(config.noise.cover_letter_regex);
  } catch (const std::regex_error& e) {
    throw ConfigError(fmt::format("filters.cover_letter_regex: {}", e.what()));
  }
}

std::string config_echo(const AnalysisConfig& config) {
  std::string out;
  const auto line = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("similarity.message_weight", fmt::format("{}", config.similarity.message_weight));
  line("similarity.threshold", fmt::format("{}", config.similarity.threshold));
  line("filters.bot_patterns", join_list(config.noise.bot_patterns));
  line("filters.pull_request_subject", join_list(config.noise.pull_request_subject_markers));
  line("filters.pull_request_body", join_list(config.noise.pull_request_body_markers));
  line("filters.backport_prefix", config.noise.backport_prefix);
  line("filters.backport_infix", config.noise.backport_infix);
  line("filters.cover_letter_regex", config.noise.cover_letter_regex);
  line("window.since", config.since ? format_rfc3339(*config.since) : "unbounded");
  line("window.until", config.until ? format_rfc3339(*config.until) : "unbounded");
  line("window.edge_margin_days", fmt::format("{}", config.window_edge_margin.count()));
  line("owners.emails", join_list(config.owners));
  return out;
}

std::string config_digest(const AnalysisConfig& config) { return sha256_hex(config_echo(config)); }

}  // namespace offlist
