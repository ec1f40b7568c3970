#pragma once

// Keyword/blocking index over profile summaries, the nested structured index
// over individual attribute/relation objects, and the corpus word statistics.
//
// A profile's summary is the deduplicated bag of its own normalized attribute
// values ("type" values and provenance excluded) plus the own values of every
// relation target whose type differs from the profile's type.
//
// Not internally synchronized; the engine serializes writers against readers.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "provlink/analyzers.hpp"
#include "provlink/profile.hpp"
#include "provlink/scoring.hpp"

namespace provlink {

inline constexpr double kPhoneticSearchWeight = 0.7;

struct QueryClause {
  std::string key;
  std::string value;  // words that must all occur in the object's value
  // For relation keys: conditions on the target's own attributes, each
  // satisfied by some attribute-object of the target.
  std::vector<std::pair<std::string, std::string>> target;
  Provenance prov;  // temporal pairs probe a date; others must occur verbatim
};

struct NestedQuery {
  std::vector<QueryClause> clauses;  // conjunctive
};

struct SearchHit {
  ProfileId id;
  double score = 0.0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

class Indexer {
 public:
  explicit Indexer(const Analyzer& analyzer, const MatchConfig& cfg);

  std::vector<std::string> summarize(const Profile& p, const Resolver& resolve) const;

  // Replaces any previous entry for p.id.
  void index_profile(const Profile& p, const Resolver& resolve);
  void remove_profile(const ProfileId& id);
  void clear();

  bool contains(const ProfileId& id) const { return docs_.contains(id); }
  std::size_t size() const { return docs_.size(); }
  const std::vector<std::string>* summary_of(const ProfileId& id) const;
  // Indexed profiles holding a relation to `target`.
  std::vector<ProfileId> referrers(const ProfileId& target) const;

  // Ranked by the sum over query words of inf(m(w)), phonetic-only matches
  // weighted by kPhoneticSearchWeight; ties by ascending id.
  std::vector<SearchHit> keyword_search(std::string_view q, std::size_t k) const;
  std::vector<SearchHit> search_words(std::span<const std::string> words, std::size_t k) const;

  // Throws MalformedQuery for an empty clause list or clause key.
  std::vector<ProfileId> nested_search(const NestedQuery& q) const;

  // Top-k profiles for p's summary words, p itself excluded.
  std::vector<ProfileId> candidates(const Profile& p, std::size_t k,
                                    const Resolver& resolve) const;

  std::size_t word_count(std::string_view w) const { return stats_.count(w); }
  const WordStats& stats() const { return stats_; }

  // `dir/index` holds a header with the KB generation, one record per
  // profile summary and a final word-stats record. load() returns false
  // (leaving the index untouched) when missing, corrupt or stale.
  void save(const std::filesystem::path& dir, std::uint64_t generation) const;
  bool load(const std::filesystem::path& dir, std::uint64_t generation,
            const std::vector<Profile>& profiles);

 private:
  struct Object {
    std::string key;
    std::set<std::string, std::less<>> words;
    Provenance prov;
    std::optional<ProfileId> target;
  };
  struct Doc {
    std::vector<std::string> summary;
    std::vector<std::string> codes;
    std::vector<Object> objects;
    std::vector<ProfileId> targets;
  };

  Doc build_doc(const Profile& p, std::vector<std::string> summary) const;
  void insert_doc(const ProfileId& id, Doc doc);
  bool object_matches(const Object& o, const QueryClause& c,
                      const std::vector<std::string>& value_words) const;
  bool target_matches(const ProfileId& target,
                      const std::vector<std::pair<std::string, std::string>>& conds) const;

  const Analyzer& analyzer_;
  const MatchConfig& cfg_;
  std::map<ProfileId, Doc> docs_;
  std::map<std::string, std::set<ProfileId>, std::less<>> postings_;
  std::map<std::string, std::set<ProfileId>, std::less<>> phonetic_;
  std::map<std::string, std::set<std::pair<ProfileId, std::size_t>>, std::less<>> by_key_;
  std::map<ProfileId, std::set<ProfileId>> referrers_;
  WordStats stats_;
};

// Temporal probe: true when the object's validity interval covers some day of
// the period named by `date`. Objects without temporal provenance never match.
bool valid_at(std::span<const ProvPair> prov, std::string_view date);

}  // namespace provlink
