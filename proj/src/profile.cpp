#include "provlink/profile.hpp"

#include <algorithm>
#include <set>

#include "provlink/error.hpp"
#include "provlink/temporal.hpp"

namespace provlink {

ProfileId::ProfileId(std::string value) : value_(std::move(value)) {
  if (!valid(value_)) {
    throw Error(ErrorCode::InvalidId, "invalid profile id '" + value_ + "'");
  }
}

bool ProfileId::valid(std::string_view value) {
  return !value.empty() && value.find('-') == std::string_view::npos;
}

std::string Profile::label() const {
  for (const auto& a : attributes) {
    if (a.key == kTypeKey) return a.value;
  }
  return std::string(kUnknownLabel);
}

namespace {

void check_prov(const Provenance& prov, const std::string& owner) {
  for (const auto& p : prov) {
    if (p.pkey.empty()) {
      throw Error(ErrorCode::EmptyKey, "empty provenance key on '" + owner + "'");
    }
    if (is_temporal_pkey(p.pkey) && !parse_date(p.pvalue)) {
      throw Error(ErrorCode::InvalidProvenance,
                  "unparseable date '" + p.pvalue + "' for '" + p.pkey + "' on '" + owner + "'");
    }
  }
}

template <typename T>
void dedup_in_order(std::vector<T>& items) {
  std::set<T> seen;
  std::erase_if(items, [&](const T& item) { return !seen.insert(item).second; });
}

}  // namespace

Profile make_profile(ProfileId id, std::vector<AttributeObject> attributes,
                     std::vector<RelationObject> relations) {
  if (id.empty()) throw Error(ErrorCode::InvalidId, "empty profile id");
  for (const auto& a : attributes) {
    if (a.key.empty()) throw Error(ErrorCode::EmptyKey, "empty attribute key in " + id.str());
    if (a.value.empty()) {
      throw Error(ErrorCode::EmptyValue, "empty value for attribute '" + a.key + "' in " + id.str());
    }
    check_prov(a.prov, a.key);
  }
  for (const auto& r : relations) {
    if (r.key.empty()) throw Error(ErrorCode::EmptyKey, "empty relation key in " + id.str());
    if (r.target.empty()) {
      throw Error(ErrorCode::EmptyValue, "empty target for relation '" + r.key + "' in " + id.str());
    }
    check_prov(r.prov, r.key);
  }
  dedup_in_order(attributes);
  dedup_in_order(relations);
  return Profile{std::move(id), std::move(attributes), std::move(relations)};
}

std::vector<RelationEdge> relation_edges(const Profile& p) {
  std::vector<RelationEdge> out;
  out.reserve(p.relations.size());
  for (const auto& r : p.relations) {
    out.push_back(RelationEdge{r.key, p.id, r.target, r.prov});
  }
  return out;
}

std::vector<KeyedValue> values_of(const Profile& p, std::string_view key) {
  std::vector<KeyedValue> out;
  for (const auto& a : p.attributes) {
    if (a.key == key) out.push_back(KeyedValue{a.value, a.prov});
  }
  for (const auto& r : p.relations) {
    if (r.key == key) out.push_back(KeyedValue{r.target.str(), r.prov});
  }
  return out;
}

std::string_view decision_name(Decision d) {
  switch (d) {
    case Decision::pending: return "pending";
    case Decision::match: return "match";
    case Decision::nonmatch: return "nonmatch";
  }
  return "pending";
}

std::optional<Decision> parse_decision(std::string_view text) {
  if (text == "pending") return Decision::pending;
  if (text == "match") return Decision::match;
  if (text == "nonmatch") return Decision::nonmatch;
  return std::nullopt;
}

std::pair<ProfileId, ProfileId> canonical_pair(const ProfileId& a, const ProfileId& b) {
  if (a == b) throw Error(ErrorCode::SameId, "pair of identical ids '" + a.str() + "'");
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

void ProfilesGraph::put_node(Profile p) {
  auto id = p.id;
  nodes_.insert_or_assign(std::move(id), std::move(p));
}

bool ProfilesGraph::remove_node(const ProfileId& id) {
  if (nodes_.erase(id) == 0) return false;
  std::erase_if(similarity_, [&](const auto& kv) {
    return kv.first.first == id || kv.first.second == id;
  });
  return true;
}

const Profile* ProfilesGraph::node(const ProfileId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<RelationEdge> ProfilesGraph::relation_edge_set() const {
  std::vector<RelationEdge> out;
  for (const auto& [id, p] : nodes_) {
    auto edges = relation_edges(p);
    out.insert(out.end(), std::make_move_iterator(edges.begin()),
               std::make_move_iterator(edges.end()));
  }
  return out;
}

std::vector<RelationEdge> ProfilesGraph::dangling_edges() const {
  auto all = relation_edge_set();
  std::erase_if(all, [&](const RelationEdge& e) { return nodes_.contains(e.target); });
  return all;
}

void ProfilesGraph::put_similarity_edge(SimilarityEdge e) {
  auto [a, b] = canonical_pair(e.id1, e.id2);
  e.id1 = a;
  e.id2 = b;
  similarity_.insert_or_assign({std::move(a), std::move(b)}, std::move(e));
}

const SimilarityEdge* ProfilesGraph::similarity_edge(const ProfileId& a,
                                                     const ProfileId& b) const {
  auto it = similarity_.find(canonical_pair(a, b));
  return it == similarity_.end() ? nullptr : &it->second;
}

std::vector<SimilarityEdge> ProfilesGraph::similarity_edges() const {
  std::vector<SimilarityEdge> out;
  out.reserve(similarity_.size());
  for (const auto& [k, e] : similarity_) out.push_back(e);
  return out;
}

}  // namespace provlink
