#pragma once

// Entity linking engine: the knowledge base, its indexes and the similarity
// store behind one single-writer path. Linking blocks each profile through the
// keyword index, scores every candidate and keeps an edge for each pair whose
// simsc reaches tau_store. Confirmed edges keep their verdict forever; link
// runs only refresh their scores.

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "provlink/analyzers.hpp"
#include "provlink/indexer.hpp"
#include "provlink/kb_store.hpp"
#include "provlink/scoring.hpp"
#include "provlink/sim_store.hpp"

namespace provlink {

enum class Verdict { confirmed_match, confirmed_nonmatch };

std::optional<Verdict> parse_verdict(std::string_view text);  // "match" / "nonmatch"

struct LinkRunStats {
  std::size_t profiles_processed = 0;
  std::size_t pairs_scored = 0;
  std::size_t edges_upserted = 0;
  std::size_t edges_pruned = 0;
  double elapsed_seconds = 0.0;
};

// match iff simsc >= tau_match and rejsc <= rho_max; nonmatch iff
// simsc < tau_store; pending otherwise.
Decision predict(double simsc, std::uint32_t rejsc, const MatchConfig& cfg);

struct EngineOptions {
  MatchConfig cfg;
  Layout layout = Layout::kv_dual;
  // When set, kb/, idx/ and sim/ live under this directory.
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::filesystem::path> aliases_file;
  std::optional<std::filesystem::path> street_types_file;
};

class Engine {
 public:
  explicit Engine(EngineOptions opts = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const MatchConfig& config() const { return cfg_; }
  const Analyzer& analyzer() const { return analyzer_; }

  // Stores and indexes p; profiles relating to p are re-indexed since their
  // summaries may include p's values.
  void put_profile(const Profile& p);
  // put_profile followed by link_profile.
  std::vector<SimilarityEdge> put_and_link(const Profile& p);
  void delete_profile(const ProfileId& id);

  Profile get_profile(const ProfileId& id) const;  // NotFound
  std::optional<Profile> find_profile(const ProfileId& id) const;
  std::vector<Profile> profiles() const;
  std::size_t profile_count() const;

  std::vector<SearchHit> search(std::string_view q, std::size_t k) const;
  std::vector<ProfileId> structured_search(const NestedQuery& q) const;
  std::vector<ProfileId> candidates(const ProfileId& id, std::size_t k) const;
  std::vector<std::string> summary(const ProfileId& id) const;  // NotFound
  std::size_t word_count(std::string_view w) const;

  double simsc(const ProfileId& a, const ProfileId& b) const;
  std::uint32_t rejsc(const ProfileId& a, const ProfileId& b) const;

  // Scores p against its candidates and its existing neighbors. Returns the
  // edges written. Throws NotFound.
  std::vector<SimilarityEdge> link_profile(const ProfileId& id);
  std::vector<SimilarityEdge> link_profile(const ProfileId& id, std::size_t k);
  // Every stored profile in id order; each unordered pair scored once.
  LinkRunStats link_all();
  LinkRunStats link_all(std::size_t k);

  // Throws NotFound when no edge exists for the pair.
  SimilarityEdge confirm(const ProfileId& a, const ProfileId& b, Verdict v);

  std::optional<SimilarityEdge> edge(const ProfileId& a, const ProfileId& b) const;
  std::vector<SimilarityEdge> edges() const;
  // Edges touching id, strongest first.
  std::vector<SimilarityEdge> similar(const ProfileId& id) const;
  // Unconfirmed edges with simsc >= min_score, by descending simsc then ids.
  std::vector<SimilarityEdge> pending(double min_score, std::size_t limit) const;

  // Writes snapshots (kb, sim, index) when persistent.
  void checkpoint();

  const SimilarityStore& similarity_store() const { return *sim_; }

 private:
  struct Link {
    std::vector<SimilarityEdge> written;
    std::size_t scored = 0;
    std::size_t pruned = 0;
  };

  Resolver resolver() const;
  Scorer scorer() const;
  void index_locked(const Profile& p);
  Link link_locked(const ProfileId& id, std::size_t k, std::set<std::pair<ProfileId, ProfileId>>* seen);

  MatchConfig cfg_;
  Analyzer analyzer_;
  std::optional<std::filesystem::path> dir_;
  std::unique_ptr<KbStore> kb_;
  Indexer index_;
  std::unique_ptr<SimilarityStore> sim_;

  std::mutex writer_;
  mutable std::shared_mutex data_;
};

}  // namespace provlink
