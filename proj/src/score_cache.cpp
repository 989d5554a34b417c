#include "offlist/score_cache.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "offlist/error.hpp"
#include "offlist/text.hpp"

namespace offlist {

namespace fs = std::filesystem;

std::string ScoreCache::pair_key(std::string_view digest_a, std::string_view digest_b,
                                 const SimilarityConfig& config) {
  if (digest_b < digest_a) std::swap(digest_a, digest_b);
  return sha256_hex(fmt::format("score-v1\n{}\n{}\n{}", digest_a, digest_b, config.message_weight));
}

std::optional<SimilarityScore> ScoreCache::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::insert(std::string key, const SimilarityScore& score) {
  entries_.insert_or_assign(std::move(key), score);
}

namespace {

bool parse_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

void ScoreCache::load(const fs::path& dir) {
  const fs::path scores = dir / "scores";
  if (!fs::is_directory(scores)) return;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(scores)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tsv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw InputError(fmt::format("cannot read score cache file {}", file.string()));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream fields(line);
      std::string key, v, m, d;
      SimilarityScore s;
      if (!(fields >> key >> v >> m >> d) || !parse_double(v, s.value) ||
          !parse_double(m, s.message_component) || !parse_double(d, s.diff_component)) {
        throw InputError(fmt::format("{}:{}: corrupt score cache entry", file.string(), line_no));
      }
      entries_.insert_or_assign(std::move(key), s);
    }
  }
}

void ScoreCache::save(const fs::path& dir) const {
  const fs::path scores = dir / "scores";
  fs::create_directories(scores);
  std::map<std::string, std::vector<const std::pair<const std::string, SimilarityScore>*>> buckets;
  for (const auto& entry : entries_) buckets[entry.first.substr(0, 2)].push_back(&entry);
  for (auto& [bucket, entries] : buckets) {
    std::sort(entries.begin(), entries.end(),
              [](const auto* x, const auto* y) { return x->first < y->first; });
    const fs::path target = scores / (bucket + ".tsv");
    const fs::path tmp = scores / (bucket + ".tsv.tmp");
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
      for (const auto* e : entries) {
        out << fmt::format("{} {} {} {}\n", e->first, e->second.value,
                           e->second.message_component, e->second.diff_component);
      }
    }
    fs::rename(tmp, target);
  }
}

}  // namespace offlist
