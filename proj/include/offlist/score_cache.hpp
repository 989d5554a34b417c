#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "offlist/similarity.hpp"

namespace offlist {

// Content-addressed store of pair scores. Keys are digests of the two patch
// contents (order-independent) and the score-relevant configuration, so a
// cached score is valid for any run that sees the same pair of patches.
//
// On disk: <dir>/scores/<first two hex digits>.tsv, one `key value msg diff`
// line per entry, sorted by key.
class ScoreCache {
 public:
  static std::string pair_key(std::string_view digest_a, std::string_view digest_b,
                              const SimilarityConfig& config);

  std::optional<SimilarityScore> find(const std::string& key) const;
  void insert(std::string key, const SimilarityScore& score);
  std::size_t size() const { return entries_.size(); }

  std::size_t hits() const { return hits_; }
  void count_hit() { ++hits_; }

  // Missing directory is an empty cache. Throws InputError on corrupt files.
  void load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

 private:
  std::unordered_map<std::string, SimilarityScore> entries_;
  std::size_t hits_ = 0;
};

}  // namespace offlist
