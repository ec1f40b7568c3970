#include "provlink/linker.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "provlink/error.hpp"

namespace provlink {

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "match") return Verdict::confirmed_match;
  if (text == "nonmatch") return Verdict::confirmed_nonmatch;
  return std::nullopt;
}

Decision predict(double simsc, std::uint32_t rejsc, const MatchConfig& cfg) {
  if (simsc < cfg.tau_store) return Decision::nonmatch;
  if (simsc >= cfg.tau_match && rejsc <= cfg.rho_max) return Decision::match;
  return Decision::pending;
}

namespace {

Analyzer make_analyzer(const EngineOptions& opts) {
  Analyzer a;
  if (opts.aliases_file) a.aliases = AliasDictionary::load(*opts.aliases_file);
  if (opts.street_types_file) a.streets = StreetTypeDictionary::load(*opts.street_types_file);
  return a;
}

bool stronger(const SimilarityEdge& a, const SimilarityEdge& b) {
  if (a.simsc != b.simsc) return a.simsc > b.simsc;
  return std::tie(a.id1, a.id2) < std::tie(b.id1, b.id2);
}

}  // namespace

Engine::Engine(EngineOptions opts)
    : cfg_(std::move(opts.cfg)),
      analyzer_(make_analyzer(opts)),
      dir_(opts.data_dir),
      index_(analyzer_, cfg_),
      sim_(make_similarity_store(opts.layout, cfg_.tau_store)) {
  cfg_.validate();
  if (dir_) {
    kb_ = std::make_unique<KbStore>(*dir_ / "kb");
    sim_->attach(*dir_ / "sim");
  } else {
    kb_ = std::make_unique<KbStore>();
  }
  auto all = kb_->scan_profiles();
  if (!dir_ || !index_.load(*dir_ / "idx", kb_->generation(), all)) {
    index_.clear();
    for (const auto& p : all) index_.index_profile(p, resolver());
  }
}

Resolver Engine::resolver() const {
  return [this](const ProfileId& id) { return kb_->find_profile(id); };
}

Scorer Engine::scorer() const { return Scorer(cfg_, analyzer_, index_.stats(), resolver()); }

void Engine::index_locked(const Profile& p) {
  index_.index_profile(p, resolver());
  for (const auto& ref : index_.referrers(p.id)) {
    if (ref == p.id) continue;
    if (auto q = kb_->find_profile(ref)) index_.index_profile(*q, resolver());
  }
}

void Engine::put_profile(const Profile& p) {
  std::lock_guard w(writer_);
  std::unique_lock lock(data_);
  kb_->put_profile(p);
  index_locked(p);
}

std::vector<SimilarityEdge> Engine::put_and_link(const Profile& p) {
  put_profile(p);
  return link_profile(p.id);
}

void Engine::delete_profile(const ProfileId& id) {
  std::lock_guard w(writer_);
  std::unique_lock lock(data_);
  auto refs = index_.referrers(id);
  kb_->delete_profile(id);
  index_.remove_profile(id);
  for (const auto& ref : refs) {
    if (auto q = kb_->find_profile(ref)) index_.index_profile(*q, resolver());
  }
  for (const auto& e : sim_->neighbors(id)) sim_->delete_edge(e.id1, e.id2);
}

Profile Engine::get_profile(const ProfileId& id) const { return kb_->get_profile(id); }

std::optional<Profile> Engine::find_profile(const ProfileId& id) const {
  return kb_->find_profile(id);
}

std::vector<Profile> Engine::profiles() const { return kb_->scan_profiles(); }

std::size_t Engine::profile_count() const { return kb_->profile_count(); }

std::vector<SearchHit> Engine::search(std::string_view q, std::size_t k) const {
  std::shared_lock lock(data_);
  return index_.keyword_search(q, k);
}

std::vector<ProfileId> Engine::structured_search(const NestedQuery& q) const {
  std::shared_lock lock(data_);
  return index_.nested_search(q);
}

std::vector<ProfileId> Engine::candidates(const ProfileId& id, std::size_t k) const {
  std::shared_lock lock(data_);
  return index_.candidates(kb_->get_profile(id), k, resolver());
}

std::vector<std::string> Engine::summary(const ProfileId& id) const {
  std::shared_lock lock(data_);
  const auto* s = index_.summary_of(id);
  if (!s) throw Error(ErrorCode::NotFound, "profile not found: " + id.str());
  return *s;
}

std::size_t Engine::word_count(std::string_view w) const {
  std::shared_lock lock(data_);
  return index_.word_count(w);
}

double Engine::simsc(const ProfileId& a, const ProfileId& b) const {
  std::shared_lock lock(data_);
  return scorer().simsc(kb_->get_profile(a), kb_->get_profile(b));
}

std::uint32_t Engine::rejsc(const ProfileId& a, const ProfileId& b) const {
  std::shared_lock lock(data_);
  return scorer().rejsc(kb_->get_profile(a), kb_->get_profile(b));
}

Engine::Link Engine::link_locked(const ProfileId& id, std::size_t k,
                                 std::set<std::pair<ProfileId, ProfileId>>* seen) {
  struct Scored {
    ProfileId other;
    double simsc;
    std::uint32_t rejsc;
  };
  Link out;
  std::vector<Scored> scored;
  {
    std::shared_lock lock(data_);
    auto p = kb_->get_profile(id);
    auto others = index_.candidates(p, k, resolver());
    for (const auto& e : sim_->neighbors(id)) others.push_back(e.id1 == id ? e.id2 : e.id1);
    std::sort(others.begin(), others.end());
    others.erase(std::unique(others.begin(), others.end()), others.end());
    auto sc = scorer();
    for (const auto& other : others) {
      if (other == id) continue;
      if (seen && !seen->insert(canonical_pair(id, other)).second) continue;
      auto q = kb_->find_profile(other);
      if (!q) continue;
      scored.push_back({other, sc.simsc(p, *q), sc.rejsc(p, *q)});
    }
  }
  std::unique_lock lock(data_);
  for (const auto& s : scored) {
    ++out.scored;
    auto [a, b] = canonical_pair(id, s.other);
    auto existing = sim_->find_edge(a, b);
    bool confirmed = existing && existing->cfm;
    if (s.simsc < cfg_.tau_store && !confirmed) {
      ++out.pruned;
      if (existing) sim_->delete_edge(a, b);
      continue;
    }
    SimilarityEdge e{a, b, s.simsc, s.rejsc, false, predict(s.simsc, s.rejsc, cfg_)};
    if (confirmed) {
      e.cfm = true;
      e.decision = existing->decision;
    }
    sim_->upsert_edge(e);
    out.written.push_back(std::move(e));
  }
  return out;
}

std::vector<SimilarityEdge> Engine::link_profile(const ProfileId& id) {
  return link_profile(id, cfg_.candidates_k);
}

std::vector<SimilarityEdge> Engine::link_profile(const ProfileId& id, std::size_t k) {
  std::lock_guard w(writer_);
  return link_locked(id, k, nullptr).written;
}

LinkRunStats Engine::link_all() { return link_all(cfg_.candidates_k); }

LinkRunStats Engine::link_all(std::size_t k) {
  auto start = std::chrono::steady_clock::now();
  LinkRunStats stats;
  std::set<std::pair<ProfileId, ProfileId>> seen;
  for (const auto& id : kb_->ids()) {
    // Writer held per profile so confirmations interleave with long runs.
    std::lock_guard w(writer_);
    if (!kb_->contains(id)) continue;
    auto link = link_locked(id, k, &seen);
    ++stats.profiles_processed;
    stats.pairs_scored += link.scored;
    stats.edges_upserted += link.written.size();
    stats.edges_pruned += link.pruned;
  }
  stats.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

SimilarityEdge Engine::confirm(const ProfileId& a, const ProfileId& b, Verdict v) {
  std::lock_guard w(writer_);
  std::unique_lock lock(data_);
  auto e = sim_->get_edge(a, b);
  e.cfm = true;
  e.decision = v == Verdict::confirmed_match ? Decision::match : Decision::nonmatch;
  sim_->upsert_edge(e);
  return e;
}

std::optional<SimilarityEdge> Engine::edge(const ProfileId& a, const ProfileId& b) const {
  std::shared_lock lock(data_);
  return sim_->find_edge(a, b);
}

std::vector<SimilarityEdge> Engine::edges() const {
  std::shared_lock lock(data_);
  return sim_->all_edges();
}

std::vector<SimilarityEdge> Engine::similar(const ProfileId& id) const {
  std::shared_lock lock(data_);
  auto out = sim_->neighbors(id);
  std::sort(out.begin(), out.end(), stronger);
  return out;
}

std::vector<SimilarityEdge> Engine::pending(double min_score, std::size_t limit) const {
  std::shared_lock lock(data_);
  std::vector<SimilarityEdge> out;
  for (auto& e : sim_->all_edges()) {
    if (!e.cfm && e.simsc >= min_score) out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), stronger);
  if (out.size() > limit) out.resize(limit);
  return out;
}

void Engine::checkpoint() {
  if (!dir_) return;
  std::lock_guard w(writer_);
  std::unique_lock lock(data_);
  kb_->checkpoint();
  sim_->checkpoint();
  index_.save(*dir_ / "idx", kb_->generation());
}

}  // namespace provlink
