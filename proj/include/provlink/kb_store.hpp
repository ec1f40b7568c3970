#pragma once

// Node/relation table: one row per attribute or relation value of a profile,
// with its provenance. Rows live in the ordered key-value substrate under
// key = profile_id + '\0' + zero-padded seq; the bare `profile_id + '\0'` key
// registers the profile so that empty profiles survive a round trip.
//
// On disk (when opened on a directory): `log` holds length-prefixed JSON
// frames, a {"op":"put","profile_id":..,"rows":N} header followed by N NodeRow
// frames, or {"op":"delete","profile_id":..}; `snapshot` holds the same
// framing for every profile and is rewritten by checkpoint().

#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <vector>

#include <nlohmann/json.hpp>

#include "provlink/ordered_kv.hpp"
#include "provlink/profile.hpp"

namespace provlink {

struct NodeRow {
  enum class Kind { attribute, relation };

  ProfileId profile_id;
  Kind kind = Kind::attribute;
  std::string key;
  std::string value_or_target;
  Provenance prov;
  std::uint32_t seq = 0;

  friend bool operator==(const NodeRow&, const NodeRow&) = default;
};

std::vector<NodeRow> to_rows(const Profile& p);
Profile from_rows(const ProfileId& id, std::span<const NodeRow> rows);

nlohmann::json row_to_json(const NodeRow& row);
NodeRow row_from_json(const nlohmann::json& j);

class KbStore {
 public:
  KbStore() = default;
  explicit KbStore(const std::filesystem::path& dir);

  // Replaces every row of p.id atomically; durable on return when persistent.
  void put_profile(const Profile& p);
  Profile get_profile(const ProfileId& id) const;  // throws NotFound
  std::optional<Profile> find_profile(const ProfileId& id) const;
  bool contains(const ProfileId& id) const;
  void delete_profile(const ProfileId& id);  // idempotent

  // Ascending id order.
  std::vector<Profile> scan_profiles() const;
  void for_each_profile(const std::function<void(const Profile&)>& fn) const;
  std::vector<ProfileId> ids() const;

  std::vector<NodeRow> rows_of(const ProfileId& id) const;
  std::size_t row_count() const;
  std::size_t profile_count() const;
  // Number of committed mutations; persisted with the data.
  std::uint64_t generation() const;

  void checkpoint();

 private:
  std::vector<NodeRow> rows_locked(const ProfileId& id, bool& registered) const;
  void replay(const std::vector<std::string>& frames);
  void apply_put(const ProfileId& id, const std::vector<NodeRow>& rows);
  void apply_delete(const ProfileId& id);

  mutable std::shared_mutex mu_;
  OrderedKv kv_;
  std::filesystem::path dir_;
  FramedLog log_;
  std::uint64_t generation_ = 0;
  std::size_t profiles_ = 0;
};

}  // namespace provlink
