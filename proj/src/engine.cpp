#include "offlist/engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "offlist/error.hpp"
#include "offlist/kernels.hpp"

namespace offlist {

namespace fs = std::filesystem;
using nlohmann::json;

ClusterClass classify_cluster(const Cluster& cluster) {
  bool mail = false;
  bool commit = false;
  for (const auto& m : cluster.members) {
    mail = mail || m.origin == Origin::mail;
    commit = commit || m.origin == Origin::commit;
  }
  if (mail && commit) return ClusterClass::integrated;
  return commit ? ClusterClass::off_list : ClusterClass::unintegrated;
}

namespace {

void offer_nearest(std::optional<NearestMail>& best, const std::string& message_id, double score) {
  if (!best || score > best->score || (score == best->score && message_id < best->message_id)) {
    best = NearestMail{message_id, score};
  }
}

bool near_window_start(const AnalysisConfig& config, Timestamp author_date) {
  return config.since && author_date < *config.since + config.window_edge_margin;
}

OffListCandidate make_candidate(const std::string& hash, Timestamp author_date, const std::string& cluster_id,
                                const CommitExclusion& exclusions, const std::optional<NearestMail>& nearest,
                                const AnalysisConfig& config) {
  OffListCandidate c;
  c.commit = hash;
  c.author_date = author_date;
  c.cluster_id = cluster_id;
  c.exclusions = exclusions;
  c.nearest_mail = nearest;
  c.flagged = !exclusions.any();
  c.window_edge = near_window_start(config, author_date);
  return c;
}

SummaryCounts count_candidates(std::size_t messages_total, std::size_t messages_with_patches,
                               std::size_t mail_patches, std::size_t universe_commits,
                               std::span<const OffListCandidate> candidates) {
  std::size_t reverts = 0;
  std::size_t owners = 0;
  for (const auto& c : candidates) {
    if (c.exclusions.revert) {
      ++reverts;
    } else if (c.exclusions.owner) {
      ++owners;
    }
  }
  auto counts = SummaryCounts::from_exclusions(messages_total, messages_with_patches, universe_commits,
                                               candidates.size(), reverts, owners);
  counts.mail_patches = mail_patches;
  return counts;
}

// Scores `pairs` through the optional cache, computing misses with the
// selected kernel.
std::vector<SimilarityScore> score_with_cache(std::span<const Patch> universe,
                                              std::span<const std::string> digests,
                                              std::span<const IndexPair> pairs, const SimilarityConfig& config,
                                              ScoreCache* cache, Execution execution) {
  std::vector<SimilarityScore> scores(pairs.size());
  std::vector<std::string> keys(pairs.size());
  std::vector<IndexPair> missing;
  std::vector<std::size_t> slot;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (cache) {
      keys[k] = ScoreCache::pair_key(digests[pairs[k].first], digests[pairs[k].second], config);
      if (auto hit = cache->find(keys[k])) {
        scores[k] = *hit;
        cache->count_hit();
        continue;
      }
    }
    missing.push_back(pairs[k]);
    slot.push_back(k);
  }
  const auto fresh = execution == Execution::parallel ? kernels::score_pairs(universe, missing, config)
                                                      : reference::score_pairs(universe, missing, config);
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    scores[slot[k]] = fresh[k];
    if (cache) cache->insert(keys[slot[k]], fresh[k]);
  }
  return scores;
}

}  // namespace

AnalysisReport run_analysis(std::span<const MailArtifact> mails, std::span<const Commit> commits,
                            const AnalysisConfig& config, const RunOptions& options) {
  validate(config);

  std::vector<const MailArtifact*> mail_order;
  for (const auto& m : mails) mail_order.push_back(&m);
  std::sort(mail_order.begin(), mail_order.end(),
            [](const MailArtifact* a, const MailArtifact* b) { return a->message_id < b->message_id; });
  mail_order.erase(std::unique(mail_order.begin(), mail_order.end(),
                               [](const MailArtifact* a, const MailArtifact* b) {
                                 return a->message_id == b->message_id;
                               }),
                   mail_order.end());

  std::vector<Patch> universe;
  std::size_t with_patches = 0;
  for (const auto* m : mail_order) {
    auto patch = extract_mail_patch(*m);
    if (patch) ++with_patches;
    if (filter_mail_noise(*m, patch, config.noise).kept) universe.push_back(std::move(*patch));
  }
  const std::size_t mail_patches = universe.size();

  std::vector<const Commit*> commit_order;
  for (const auto& c : commits) commit_order.push_back(&c);
  std::sort(commit_order.begin(), commit_order.end(),
            [](const Commit* a, const Commit* b) { return a->hash < b->hash; });

  const auto window = config.window();
  std::map<std::string, std::pair<const Commit*, CommitExclusion>> commit_info;
  for (const auto* c : commit_order) {
    const auto exclusions = evaluate_exclusions(*c, config.owners, window);
    if (!exclusions.in_universe()) continue;
    if (!commit_info.emplace(c->hash, std::pair{c, exclusions}).second) {
      throw InputError(fmt::format("duplicate commit {}", c->hash));
    }
    universe.push_back(extract_commit_patch(*c));
  }
  const std::size_t universe_commits = universe.size() - mail_patches;
  if (universe_commits == 0) throw InputError("nothing to analyze");

  GraphOptions graph_options;
  graph_options.execution = options.execution;
  graph_options.cache = options.cache;
  const auto graph = build_similarity_graph(universe, config.similarity, graph_options);
  const auto clusters = connected_components(graph);

  std::map<std::string, std::optional<NearestMail>> nearest;
  for (const auto& e : graph.edges) {
    const auto& a = universe[e.a];
    const auto& b = universe[e.b];
    if (a.origin() == b.origin()) continue;
    const auto& mail = a.origin() == Origin::mail ? a : b;
    const auto& commit = a.origin() == Origin::mail ? b : a;
    offer_nearest(nearest[commit.id.key], mail.id.key, e.score.value);
  }

  AnalysisReport report;
  report.config_echo = config_echo(config);
  for (const auto& cluster : clusters) {
    const auto cls = classify_cluster(cluster);
    report.clusters.push_back({cluster, cls});
    if (cls != ClusterClass::off_list) continue;
    for (const auto& member : cluster.members) {
      const auto& [commit, exclusions] = commit_info.at(member.key);
      const auto it = nearest.find(member.key);
      report.candidates.push_back(make_candidate(commit->hash, commit->author_date, cluster.id.key, exclusions,
                                                 it == nearest.end() ? std::nullopt : it->second, config));
    }
  }
  sort_candidates(report.candidates);
  report.counts = count_candidates(mail_order.size(), with_patches, mail_patches, universe_commits,
                                   report.candidates);
  return report;
}

std::optional<long long> temporal_advantage(Timestamp public_date, std::optional<Timestamp> downstream_date) {
  if (!downstream_date) return std::nullopt;
  return floor_days_between(public_date, *downstream_date);
}

std::string format_temporal_advantage(std::optional<long long> days) {
  if (!days) return "n/a";
  if (*days > 0) return fmt::format("+{}d", *days);
  return fmt::format("{}d", *days);
}

// ---------------------------------------------------------------------------
// Incremental state

namespace {

constexpr std::size_t kNoMail = std::numeric_limits<std::size_t>::max();
constexpr std::string_view kManifestFormat = "offlist-state-v1";

}  // namespace

AnalysisState::AnalysisState(AnalysisConfig config)
    : config_(std::move(config)), digest_(offlist::config_digest(config_)) {
  validate(config_);
}

std::size_t AnalysisState::add_vertex(Patch patch) {
  const std::size_t v = patches_.size();
  digests_.push_back(patch_digest(patch));
  mail_rep_.push_back(patch.origin() == Origin::mail ? v : kNoMail);
  patches_.push_back(std::move(patch));
  sets_.add();
  return v;
}

std::size_t AnalysisState::mail_of(std::size_t vertex) const { return mail_rep_[sets_.find(vertex)]; }

void AnalysisState::link(std::size_t a, std::size_t b) {
  const auto ra = sets_.find(a);
  const auto rb = sets_.find(b);
  if (ra == rb) return;
  const auto ma = mail_rep_[ra];
  const auto mb = mail_rep_[rb];
  sets_.unite(ra, rb);
  std::size_t m = ma;
  if (m == kNoMail || (mb != kNoMail && patches_[mb].id.key < patches_[m].id.key)) m = mb;
  mail_rep_[sets_.find(ra)] = m;
}

IncrementalUpdate AnalysisState::update(std::span<const Commit> new_commits,
                                        std::span<const MailArtifact> new_mails, Execution execution) {
  std::vector<const MailArtifact*> mails;
  for (const auto& m : new_mails) mails.push_back(&m);
  std::sort(mails.begin(), mails.end(),
            [](const MailArtifact* a, const MailArtifact* b) { return a->message_id < b->message_id; });
  std::vector<const Commit*> commits;
  for (const auto& c : new_commits) commits.push_back(&c);
  std::sort(commits.begin(), commits.end(), [](const Commit* a, const Commit* b) { return a->hash < b->hash; });

  const std::size_t first_new = patches_.size();
  for (const auto* m : mails) {
    if (!messages_seen_.insert(m->message_id).second) continue;
    auto patch = extract_mail_patch(*m);
    if (patch) ++messages_with_patches_;
    if (filter_mail_noise(*m, patch, config_.noise).kept) add_vertex(std::move(*patch));
  }
  const auto window = config_.window();
  for (const auto* c : commits) {
    if (commits_.contains(c->hash)) continue;
    CommitInfo info;
    info.author_date = c->author_date;
    info.exclusions = evaluate_exclusions(*c, config_.owners, window);
    if (info.exclusions.in_universe()) info.vertex = add_vertex(extract_commit_patch(*c));
    commits_.emplace(c->hash, std::move(info));
  }

  // Each new vertex is paired with every earlier vertex sharing a file.
  // Mail-mail pairs cannot change any commit's status and are skipped.
  std::vector<IndexPair> pairs;
  for (std::size_t v = first_new; v < patches_.size(); ++v) {
    std::vector<std::size_t> partners;
    for (const auto& file : patches_[v].diff.affected()) {
      auto& bucket = by_file_[file];
      partners.insert(partners.end(), bucket.begin(), bucket.end());
      bucket.push_back(v);
    }
    std::sort(partners.begin(), partners.end());
    partners.erase(std::unique(partners.begin(), partners.end()), partners.end());
    for (const auto u : partners) {
      if (patches_[u].origin() == Origin::mail && patches_[v].origin() == Origin::mail) continue;
      pairs.emplace_back(u, v);
    }
  }
  const auto scores = score_with_cache(patches_, digests_, pairs, config_.similarity, &cache_, execution);

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [u, v] = pairs[k];
    const double s = scores[k].value;
    if (patches_[u].origin() != patches_[v].origin()) {
      const auto& mail = patches_[u].origin() == Origin::mail ? patches_[u] : patches_[v];
      const auto& commit = patches_[u].origin() == Origin::mail ? patches_[v] : patches_[u];
      offer_nearest(commits_.at(commit.id.key).nearest, mail.id.key, s);
    }
    if (s > config_.similarity.threshold) {
      links_.emplace_back(u, v);
      link(u, v);
    }
  }

  IncrementalUpdate out;
  std::set<std::string> now_flagged;
  for (auto& c : collect_candidates()) {
    if (!c.flagged) continue;
    now_flagged.insert(c.commit);
    if (!flagged_.contains(c.commit)) {
      out.events.push_back({IncrementalEvent::Kind::flagged, c.commit, std::nullopt});
      out.candidates.push_back(std::move(c));
    }
  }
  for (const auto& hash : flagged_) {
    if (now_flagged.contains(hash)) continue;
    const auto m = mail_of(*commits_.at(hash).vertex);
    out.events.push_back({IncrementalEvent::Kind::retracted, hash,
                          m == kNoMail ? std::nullopt : std::optional(patches_[m].id.key)});
  }
  std::sort(out.events.begin(), out.events.end(), [](const IncrementalEvent& a, const IncrementalEvent& b) {
    return std::tie(a.commit, a.kind) < std::tie(b.commit, b.kind);
  });
  flagged_ = std::move(now_flagged);
  return out;
}

std::vector<OffListCandidate> AnalysisState::collect_candidates() const {
  std::map<std::size_t, std::string> cluster_ids;
  for (std::size_t v = 0; v < patches_.size(); ++v) {
    const auto root = sets_.find(v);
    if (mail_rep_[root] != kNoMail) continue;
    auto [it, inserted] = cluster_ids.emplace(root, patches_[v].id.key);
    if (!inserted && patches_[v].id.key < it->second) it->second = patches_[v].id.key;
  }
  std::vector<OffListCandidate> out;
  for (const auto& [hash, info] : commits_) {
    if (!info.vertex) continue;
    const auto it = cluster_ids.find(sets_.find(*info.vertex));
    if (it == cluster_ids.end()) continue;
    out.push_back(make_candidate(hash, info.author_date, it->second, info.exclusions, info.nearest, config_));
  }
  sort_candidates(out);
  return out;
}

AnalysisReport AnalysisState::report() const {
  AnalysisReport report;
  report.config_echo = config_echo(config_);
  report.candidates = collect_candidates();
  std::size_t universe_commits = 0;
  for (const auto& [hash, info] : commits_) universe_commits += info.vertex ? 1 : 0;
  const std::size_t mail_patches = patches_.size() - universe_commits;
  report.counts = count_candidates(messages_seen_.size(), messages_with_patches_, mail_patches,
                                   universe_commits, report.candidates);
  return report;
}

void AnalysisState::save(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError(fmt::format("cannot create state directory {}", dir.string()));

  nlohmann::ordered_json manifest;
  manifest["format"] = kManifestFormat;
  manifest["config_digest"] = digest_;
  manifest["messages_seen"] = messages_seen_;
  manifest["messages_with_patches"] = messages_with_patches_;
  auto& patches = manifest["patches"] = json::array();
  for (const auto& p : patches_) {
    patches.push_back({{"key", p.id.key},
                       {"origin", std::string(to_string(p.origin()))},
                       {"message", p.message.tokens()},
                       {"diff", render_diff(p.diff)},
                       {"author_email", p.author_email},
                       {"author_date", format_rfc3339(p.author_date)}});
  }
  auto& commits = manifest["commits"] = json::array();
  for (const auto& [hash, info] : commits_) {
    nlohmann::ordered_json c;
    c["hash"] = hash;
    c["author_date"] = format_rfc3339(info.author_date);
    c["exclusions"] = {info.exclusions.revert, info.exclusions.owner, info.exclusions.merge,
                       info.exclusions.out_of_window};
    c["vertex"] = info.vertex ? json(*info.vertex) : json(nullptr);
    c["nearest"] = info.nearest ? json{{"message_id", info.nearest->message_id}, {"score", info.nearest->score}}
                                : json(nullptr);
    commits.push_back(std::move(c));
  }
  manifest["links"] = links_;
  manifest["flagged"] = flagged_;

  cache_.save(dir);
  const auto tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
    out << manifest.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    if (!out) throw InputError(fmt::format("error writing {}", tmp.string()));
  }
  fs::rename(tmp, dir / "manifest.json", ec);
  if (ec) throw InputError(fmt::format("cannot replace {}", (dir / "manifest.json").string()));
}

AnalysisState AnalysisState::load(const fs::path& dir, const AnalysisConfig& config) {
  AnalysisState state(config);
  const auto path = dir / "manifest.json";
  if (!fs::exists(path)) {
    state.cache_.load(dir);
    return state;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  try {
    const auto manifest = json::parse(in);
    if (manifest.at("format") != kManifestFormat) {
      throw InputError(fmt::format("{}: unsupported state format", path.string()));
    }
    if (manifest.at("config_digest") != state.digest_) {
      throw ConfigError(fmt::format(
          "state in {} was built with a different configuration; delete it and re-run the full analysis",
          dir.string()));
    }
    state.messages_seen_ = manifest.at("messages_seen").get<std::set<std::string>>();
    state.messages_with_patches_ = manifest.at("messages_with_patches").get<std::size_t>();
    for (const auto& p : manifest.at("patches")) {
      const auto origin = p.at("origin") == "mail" ? Origin::mail : Origin::commit;
      Patch patch;
      patch.id = PatchId{p.at("key").get<std::string>(), origin};
      patch.message = TokenSeq(p.at("message").get<std::vector<std::string>>());
      patch.diff = normalize_diff(p.at("diff").get<std::string>());
      patch.author_email = p.at("author_email").get<std::string>();
      patch.author_date = parse_rfc3339(p.at("author_date").get<std::string>());
      const auto v = state.add_vertex(std::move(patch));
      for (const auto& file : state.patches_[v].diff.affected()) state.by_file_[file].push_back(v);
    }
    for (const auto& c : manifest.at("commits")) {
      CommitInfo info;
      info.author_date = parse_rfc3339(c.at("author_date").get<std::string>());
      const auto& x = c.at("exclusions");
      info.exclusions = CommitExclusion{x.at(0).get<bool>(), x.at(1).get<bool>(), x.at(2).get<bool>(),
                                        x.at(3).get<bool>()};
      if (!c.at("vertex").is_null()) info.vertex = c.at("vertex").get<std::size_t>();
      if (!c.at("nearest").is_null()) {
        info.nearest = NearestMail{c.at("nearest").at("message_id").get<std::string>(),
                                   c.at("nearest").at("score").get<double>()};
      }
      state.commits_.emplace(c.at("hash").get<std::string>(), std::move(info));
    }
    for (const auto& l : manifest.at("links")) {
      const auto a = l.at(0).get<std::size_t>();
      const auto b = l.at(1).get<std::size_t>();
      if (a >= state.patches_.size() || b >= state.patches_.size()) throw InputError("link out of range");
      state.links_.emplace_back(a, b);
      state.link(a, b);
    }
    state.flagged_ = manifest.at("flagged").get<std::set<std::string>>();
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: corrupt state: {}", path.string(), e.what()));
  }
  state.cache_.load(dir);
  return state;
}

IncrementalUpdate update_incremental(AnalysisState& state, std::span<const Commit> new_commits,
                                     std::span<const MailArtifact> new_mails) {
  return state.update(new_commits, new_mails);
}

}  // namespace offlist
