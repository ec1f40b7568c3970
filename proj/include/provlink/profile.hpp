#pragma once

// Logical data model: entity profiles <id, attributes, relations>, the
// relation-edges derived from them, similarity-edges between profile pairs and
// the profiles graph tying both together.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace provlink {

class ProfileId {
 public:
  ProfileId() = default;
  // Throws InvalidId when empty or containing '-' (the id-pair separator).
  explicit ProfileId(std::string value);

  static bool valid(std::string_view value);

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const ProfileId&, const ProfileId&) = default;

 private:
  std::string value_;
};

struct ProvPair {
  std::string pkey;
  std::string pvalue;

  friend auto operator<=>(const ProvPair&, const ProvPair&) = default;
};

using Provenance = std::vector<ProvPair>;

struct AttributeObject {
  std::string key;
  std::string value;
  Provenance prov;

  friend auto operator<=>(const AttributeObject&, const AttributeObject&) = default;
};

struct RelationObject {
  std::string key;
  ProfileId target;
  Provenance prov;

  friend auto operator<=>(const RelationObject&, const RelationObject&) = default;
};

struct Profile {
  ProfileId id;
  std::vector<AttributeObject> attributes;
  std::vector<RelationObject> relations;

  // Node label: value of the first "type" attribute, "unknown" if absent.
  std::string label() const;

  friend bool operator==(const Profile&, const Profile&) = default;
};

inline constexpr std::string_view kTypeKey = "type";
inline constexpr std::string_view kUnknownLabel = "unknown";

// Validates every object and drops byte-identical duplicates, keeping the
// first occurrence and the original order otherwise.
Profile make_profile(ProfileId id, std::vector<AttributeObject> attributes,
                     std::vector<RelationObject> relations);

struct RelationEdge {
  std::string rel;
  ProfileId source;
  ProfileId target;
  Provenance prov;

  friend auto operator<=>(const RelationEdge&, const RelationEdge&) = default;
};

std::vector<RelationEdge> relation_edges(const Profile& p);

struct KeyedValue {
  std::string value;  // attribute value or relation target id
  Provenance prov;

  friend bool operator==(const KeyedValue&, const KeyedValue&) = default;
};

// Attribute values for `key` in order, followed by relation targets for `key`.
std::vector<KeyedValue> values_of(const Profile& p, std::string_view key);

enum class Decision { pending, match, nonmatch };

std::string_view decision_name(Decision d);
std::optional<Decision> parse_decision(std::string_view text);

struct SimilarityEdge {
  ProfileId id1;
  ProfileId id2;
  double simsc = 0.0;
  std::uint32_t rejsc = 0;
  bool cfm = false;
  Decision decision = Decision::pending;

  bool canonical() const { return id1 < id2; }

  friend bool operator==(const SimilarityEdge&, const SimilarityEdge&) = default;
};

// Orders (a, b) so that id1 < id2. Throws SameId when a == b.
std::pair<ProfileId, ProfileId> canonical_pair(const ProfileId& a, const ProfileId& b);

class ProfilesGraph {
 public:
  void put_node(Profile p);
  bool remove_node(const ProfileId& id);
  const Profile* node(const ProfileId& id) const;
  const std::map<ProfileId, Profile>& nodes() const { return nodes_; }

  // Union of relation_edges over all nodes, recomputed on each call.
  std::vector<RelationEdge> relation_edge_set() const;
  // Relation-edges whose target does not name a node.
  std::vector<RelationEdge> dangling_edges() const;

  // Stores the edge in canonical orientation; replaces any previous edge.
  void put_similarity_edge(SimilarityEdge e);
  const SimilarityEdge* similarity_edge(const ProfileId& a, const ProfileId& b) const;
  std::vector<SimilarityEdge> similarity_edges() const;

 private:
  std::map<ProfileId, Profile> nodes_;
  std::map<std::pair<ProfileId, ProfileId>, SimilarityEdge> similarity_;
};

}  // namespace provlink
