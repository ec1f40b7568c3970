#include "provlink/indexer.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "provlink/error.hpp"
#include "provlink/ordered_kv.hpp"
#include "provlink/temporal.hpp"

namespace provlink {

namespace {

void push_unique(std::vector<std::string>& out, std::set<std::string, std::less<>>& seen,
                 std::string w) {
  if (seen.insert(w).second) out.push_back(std::move(w));
}

std::vector<std::string> phonetic_codes(std::string_view word) {
  std::vector<std::string> out;
  if (word.size() < 2) return out;
  auto code = double_metaphone(word);
  if (!code.primary.empty()) out.push_back(code.primary);
  if (!code.alternate.empty() && code.alternate != code.primary) out.push_back(code.alternate);
  return out;
}

// Clause values are not alias-expanded: the object's words already are.
std::vector<std::string> clause_tokens(std::string_view value, const Analyzer& analyzer) {
  if (value.find_first_of("-./") != value.npos && parse_date(value)) {
    return value_words(value, analyzer);
  }
  return tokenize(value);
}

template <typename Set>
bool contains_all(const Set& set, const std::vector<std::string>& words) {
  return std::all_of(words.begin(), words.end(),
                     [&](const std::string& w) { return set.contains(w); });
}

}  // namespace

bool valid_at(std::span<const ProvPair> prov, std::string_view date) {
  if (!has_temporal(prov)) return false;
  auto period = parse_date(date);
  if (!period) return false;
  return validity_interval(prov).overlaps(Interval{period->first_day, period->last_day});
}

Indexer::Indexer(const Analyzer& analyzer, const MatchConfig& cfg)
    : analyzer_(analyzer), cfg_(cfg) {}

std::vector<std::string> Indexer::summarize(const Profile& p, const Resolver& resolve) const {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  for (auto& w : own_words(p, analyzer_)) push_unique(out, seen, std::move(w));
  auto label = p.label();
  std::set<ProfileId> expanded;
  for (const auto& r : p.relations) {
    if (!resolve || !expanded.insert(r.target).second) continue;
    auto target = resolve(r.target);
    if (!target || target->label() == label) continue;
    for (auto& w : own_words(*target, analyzer_)) push_unique(out, seen, std::move(w));
  }
  return out;
}

Indexer::Doc Indexer::build_doc(const Profile& p, std::vector<std::string> summary) const {
  Doc doc;
  std::set<std::string, std::less<>> seen;
  for (const auto& w : summary) {
    for (auto& c : phonetic_codes(w)) push_unique(doc.codes, seen, std::move(c));
  }
  doc.summary = std::move(summary);
  for (const auto& a : p.attributes) {
    Object o{a.key, {}, a.prov, std::nullopt};
    for (auto& w : value_words(a.value, analyzer_)) o.words.insert(std::move(w));
    for (auto& w : tokenize(a.value)) o.words.insert(std::move(w));
    doc.objects.push_back(std::move(o));
  }
  for (const auto& r : p.relations) {
    Object o{r.key, {}, r.prov, r.target};
    for (auto& w : tokenize(r.target.str())) o.words.insert(std::move(w));
    doc.objects.push_back(std::move(o));
    if (std::find(doc.targets.begin(), doc.targets.end(), r.target) == doc.targets.end()) {
      doc.targets.push_back(r.target);
    }
  }
  return doc;
}

void Indexer::insert_doc(const ProfileId& id, Doc doc) {
  remove_profile(id);
  for (const auto& w : doc.summary) postings_[w].insert(id);
  for (const auto& c : doc.codes) phonetic_[c].insert(id);
  for (std::size_t i = 0; i < doc.objects.size(); ++i) by_key_[doc.objects[i].key].insert({id, i});
  for (const auto& t : doc.targets) referrers_[t].insert(id);
  stats_.add(doc.summary);
  docs_.insert_or_assign(id, std::move(doc));
}

void Indexer::index_profile(const Profile& p, const Resolver& resolve) {
  insert_doc(p.id, build_doc(p, summarize(p, resolve)));
}

void Indexer::remove_profile(const ProfileId& id) {
  auto it = docs_.find(id);
  if (it == docs_.end()) return;
  const auto& doc = it->second;
  auto drop = [&](auto& index, const std::string& word, const auto& entry) {
    auto pos = index.find(word);
    if (pos == index.end()) return;
    pos->second.erase(entry);
    if (pos->second.empty()) index.erase(pos);
  };
  for (const auto& w : doc.summary) drop(postings_, w, id);
  for (const auto& c : doc.codes) drop(phonetic_, c, id);
  for (std::size_t i = 0; i < doc.objects.size(); ++i) {
    drop(by_key_, doc.objects[i].key, std::pair{id, i});
  }
  for (const auto& t : doc.targets) {
    auto pos = referrers_.find(t);
    if (pos == referrers_.end()) continue;
    pos->second.erase(id);
    if (pos->second.empty()) referrers_.erase(pos);
  }
  stats_.remove(doc.summary);
  docs_.erase(it);
}

void Indexer::clear() {
  docs_.clear();
  postings_.clear();
  phonetic_.clear();
  by_key_.clear();
  referrers_.clear();
  stats_.clear();
}

const std::vector<std::string>* Indexer::summary_of(const ProfileId& id) const {
  auto it = docs_.find(id);
  return it == docs_.end() ? nullptr : &it->second.summary;
}

std::vector<ProfileId> Indexer::referrers(const ProfileId& target) const {
  auto it = referrers_.find(target);
  if (it == referrers_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<SearchHit> Indexer::keyword_search(std::string_view q, std::size_t k) const {
  auto words = value_words(q, analyzer_);
  return search_words(words, k);
}

std::vector<SearchHit> Indexer::search_words(std::span<const std::string> words,
                                             std::size_t k) const {
  std::map<ProfileId, double> scores;
  std::set<std::string, std::less<>> done;
  for (const auto& w : words) {
    if (!done.insert(w).second) continue;
    double weight = double(inf(stats_.count(w), cfg_));
    const std::set<ProfileId>* exact = nullptr;
    if (auto it = postings_.find(w); it != postings_.end()) {
      exact = &it->second;
      for (const auto& id : it->second) scores[id] += weight;
    }
    std::set<ProfileId> credited;
    for (const auto& code : phonetic_codes(w)) {
      auto it = phonetic_.find(code);
      if (it == phonetic_.end()) continue;
      for (const auto& id : it->second) {
        if (exact && exact->contains(id)) continue;
        if (credited.insert(id).second) scores[id] += kPhoneticSearchWeight * weight;
      }
    }
  }
  std::vector<SearchHit> hits;
  hits.reserve(scores.size());
  for (auto& [id, s] : scores) hits.push_back({id, s});
  std::stable_sort(hits.begin(), hits.end(),
                   [](const SearchHit& a, const SearchHit& b) { return a.score > b.score; });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

bool Indexer::target_matches(const ProfileId& target,
                             const std::vector<std::pair<std::string, std::string>>& conds) const {
  auto it = docs_.find(target);
  if (it == docs_.end()) return false;
  for (const auto& [key, value] : conds) {
    auto tokens = clause_tokens(value, analyzer_);
    bool ok = std::any_of(it->second.objects.begin(), it->second.objects.end(),
                          [&](const Object& o) {
                            return !o.target && o.key == key && contains_all(o.words, tokens);
                          });
    if (!ok) return false;
  }
  return true;
}

bool Indexer::object_matches(const Object& o, const QueryClause& c,
                             const std::vector<std::string>& value_words) const {
  if (!contains_all(o.words, value_words)) return false;
  if (!c.target.empty() && (!o.target || !target_matches(*o.target, c.target))) return false;
  for (const auto& pp : c.prov) {
    if (is_temporal_pkey(pp.pkey)) {
      if (!valid_at(o.prov, pp.pvalue)) return false;
    } else if (std::find(o.prov.begin(), o.prov.end(), pp) == o.prov.end()) {
      return false;
    }
  }
  return true;
}

std::vector<ProfileId> Indexer::nested_search(const NestedQuery& q) const {
  if (q.clauses.empty()) throw Error(ErrorCode::MalformedQuery, "query has no clauses");
  for (const auto& c : q.clauses) {
    if (c.key.empty()) throw Error(ErrorCode::MalformedQuery, "clause with empty key");
    for (const auto& pp : c.prov) {
      if (pp.pkey.empty()) throw Error(ErrorCode::MalformedQuery, "empty provenance key");
      if (is_temporal_pkey(pp.pkey) && !parse_date(pp.pvalue)) {
        throw Error(ErrorCode::MalformedQuery, "unparseable date: " + pp.pvalue);
      }
    }
  }
  std::optional<std::set<ProfileId>> result;
  for (const auto& c : q.clauses) {
    auto tokens = clause_tokens(c.value, analyzer_);
    std::set<ProfileId> hits;
    if (auto it = by_key_.find(c.key); it != by_key_.end()) {
      for (const auto& [id, idx] : it->second) {
        if (result && !result->contains(id)) continue;
        if (hits.contains(id)) continue;
        if (object_matches(docs_.at(id).objects[idx], c, tokens)) hits.insert(id);
      }
    }
    result = std::move(hits);
    if (result->empty()) break;
  }
  return {result->begin(), result->end()};
}

std::vector<ProfileId> Indexer::candidates(const Profile& p, std::size_t k,
                                           const Resolver& resolve) const {
  std::vector<std::string> words;
  if (const auto* s = summary_of(p.id)) {
    words = *s;
  } else {
    words = summarize(p, resolve);
  }
  std::vector<ProfileId> out;
  for (auto& hit : search_words(words, k + 1)) {
    if (hit.id != p.id) out.push_back(std::move(hit.id));
  }
  if (out.size() > k) out.resize(k);
  return out;
}

void Indexer::save(const std::filesystem::path& dir, std::uint64_t generation) const {
  std::filesystem::create_directories(dir);
  std::vector<std::string> records;
  records.push_back(nlohmann::json{{"op", "header"}, {"generation", generation},
                                   {"profiles", docs_.size()}}.dump());
  for (const auto& [id, doc] : docs_) {
    records.push_back(nlohmann::json{{"op", "summary"}, {"id", id.str()}, {"words", doc.summary}}.dump());
  }
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [w, n] : stats_.counts()) counts[w] = n;
  records.push_back(nlohmann::json{{"op", "stats"}, {"total", stats_.total_profiles()},
                                   {"counts", counts}}.dump());
  FramedLog::write_atomic(dir / "index", records);
}

bool Indexer::load(const std::filesystem::path& dir, std::uint64_t generation,
                   const std::vector<Profile>& profiles) {
  std::map<std::string, std::vector<std::string>> summaries;
  std::map<std::string, std::size_t, std::less<>> stored;
  try {
    auto records = FramedLog::read_all(dir / "index");
    if (records.size() < 2) return false;
    auto header = nlohmann::json::parse(records.front());
    if (header.at("op") != "header" || header.at("generation").get<std::uint64_t>() != generation ||
        header.at("profiles").get<std::size_t>() != profiles.size()) {
      return false;
    }
    for (std::size_t i = 1; i + 1 < records.size(); ++i) {
      auto j = nlohmann::json::parse(records[i]);
      if (j.at("op") != "summary") return false;
      summaries[j.at("id").get<std::string>()] = j.at("words").get<std::vector<std::string>>();
    }
    auto tail = nlohmann::json::parse(records.back());
    if (tail.at("op") != "stats") return false;
    for (const auto& [w, n] : tail.at("counts").items()) stored[w] = n.get<std::size_t>();
    if (tail.at("total").get<std::size_t>() != profiles.size()) return false;
  } catch (const std::exception&) {
    return false;
  }
  clear();
  for (const auto& p : profiles) {
    auto it = summaries.find(p.id.str());
    if (it == summaries.end()) {
      clear();
      return false;
    }
    insert_doc(p.id, build_doc(p, std::move(it->second)));
  }
  if (stats_.counts() != stored) {
    clear();
    return false;
  }
  return true;
}

}  // namespace provlink
