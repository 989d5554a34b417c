#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "offlist/commit.hpp"
#include "offlist/mail.hpp"
#include "offlist/similarity.hpp"

namespace offlist {

struct AnalysisConfig {
  SimilarityConfig similarity;
  NoiseRules noise;
  std::vector<std::string> owners;  // email glob patterns
  std::optional<Timestamp> since;
  std::optional<Timestamp> until;
  // Candidates authored this close to `since` may have been discussed before
  // the mail archive starts; they carry a window_edge warning.
  std::chrono::days window_edge_margin{14};

  TimeWindow window() const;
};

// Flat sectioned key-value file:
//
//   [similarity]  message_weight, threshold
//   [filters]     bot_patterns, pull_request_subject, pull_request_body,
//                 backport_prefix, backport_infix, cover_letter_regex
//   [window]      since, until, edge_margin_days
//   [owners]      emails
//
// List values are comma separated. Unknown keys and bad values throw
// ConfigError.
AnalysisConfig load_config(const std::filesystem::path& path);
AnalysisConfig parse_config(std::string_view text);

// One pattern per line; blank lines and `#` comments ignored.
std::vector<std::string> load_owner_file(const std::filesystem::path& path);

// Throws ConfigError on inconsistent settings.
void validate(const AnalysisConfig& config);

// Canonical `section.key = value` lines, one per setting, in fixed order.
std::string config_echo(const AnalysisConfig& config);

std::string config_digest(const AnalysisConfig& config);

}  // namespace offlist
