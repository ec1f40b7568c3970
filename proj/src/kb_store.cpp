#include "provlink/kb_store.hpp"

#include <cstdio>
#include <mutex>

#include "provlink/error.hpp"
#include "provlink/json_codec.hpp"

namespace provlink {

using nlohmann::json;

namespace {

std::string marker_key(const ProfileId& id) { return id.str() + '\0'; }

std::string row_key(const ProfileId& id, std::uint32_t seq) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08u", seq);
  return marker_key(id) + buf;
}

}  // namespace

std::vector<NodeRow> to_rows(const Profile& p) {
  std::vector<NodeRow> rows;
  rows.reserve(p.attributes.size() + p.relations.size());
  std::uint32_t seq = 0;
  for (const auto& a : p.attributes) {
    rows.push_back(NodeRow{p.id, NodeRow::Kind::attribute, a.key, a.value, a.prov, seq++});
  }
  for (const auto& r : p.relations) {
    rows.push_back(NodeRow{p.id, NodeRow::Kind::relation, r.key, r.target.str(), r.prov, seq++});
  }
  return rows;
}

Profile from_rows(const ProfileId& id, std::span<const NodeRow> rows) {
  Profile p{id, {}, {}};
  for (const auto& row : rows) {
    if (row.kind == NodeRow::Kind::attribute) {
      p.attributes.push_back(AttributeObject{row.key, row.value_or_target, row.prov});
    } else {
      p.relations.push_back(RelationObject{row.key, ProfileId(row.value_or_target), row.prov});
    }
  }
  return p;
}

json row_to_json(const NodeRow& row) {
  return {{"profile_id", row.profile_id.str()},
          {"kind", row.kind == NodeRow::Kind::attribute ? "attribute" : "relation"},
          {"key", row.key},
          {"value", row.value_or_target},
          {"prov", prov_to_json(row.prov)},
          {"seq", row.seq}};
}

NodeRow row_from_json(const json& j) {
  try {
    NodeRow row;
    row.profile_id = ProfileId(j.at("profile_id").get<std::string>());
    auto kind = j.at("kind").get<std::string>();
    if (kind != "attribute" && kind != "relation") {
      throw Error(ErrorCode::StorageFailure, "bad row kind '" + kind + "'");
    }
    row.kind = kind == "attribute" ? NodeRow::Kind::attribute : NodeRow::Kind::relation;
    row.key = j.at("key").get<std::string>();
    row.value_or_target = j.at("value").get<std::string>();
    row.prov = prov_from_json(j.at("prov"));
    row.seq = j.at("seq").get<std::uint32_t>();
    return row;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageFailure, std::string("corrupt node row: ") + e.what());
  }
}

KbStore::KbStore(const std::filesystem::path& dir) : dir_(dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + dir.string());
  replay(FramedLog::read_all(dir / "snapshot"));
  replay(FramedLog::read_all(dir / "log"));
  log_ = FramedLog(dir / "log");
}

void KbStore::replay(const std::vector<std::string>& frames) {
  std::optional<std::uint64_t> snapshot_generation;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    json head;
    try {
      head = json::parse(frames[i]);
    } catch (const json::exception&) {
      throw Error(ErrorCode::StorageFailure, "corrupt kb log frame");
    }
    auto op = head.value("op", "");
    if (op == "header") {
      snapshot_generation = head.value("generation", std::uint64_t{0});
    } else if (op == "delete") {
      apply_delete(ProfileId(head.at("profile_id").get<std::string>()));
      ++generation_;
    } else if (op == "put") {
      ProfileId id(head.at("profile_id").get<std::string>());
      auto n = head.at("rows").get<std::size_t>();
      if (i + n >= frames.size()) break;  // torn transaction at the tail
      std::vector<NodeRow> rows;
      rows.reserve(n);
      for (std::size_t k = 0; k < n; ++k) rows.push_back(row_from_json(json::parse(frames[i + 1 + k])));
      apply_put(id, rows);
      ++generation_;
      i += n;
    } else {
      throw Error(ErrorCode::StorageFailure, "unknown kb log op '" + op + "'");
    }
  }
  if (snapshot_generation) generation_ = *snapshot_generation;
}

void KbStore::apply_put(const ProfileId& id, const std::vector<NodeRow>& rows) {
  std::vector<KvOp> ops;
  kv_.scan_prefix(marker_key(id), [&](const std::string& k, const std::string&) {
    ops.push_back(KvOp{KvOp::Kind::erase, k, {}});
    return true;
  });
  if (!kv_.contains(marker_key(id))) ++profiles_;
  ops.push_back(KvOp{KvOp::Kind::put, marker_key(id), {}});
  for (const auto& row : rows) {
    ops.push_back(KvOp{KvOp::Kind::put, row_key(id, row.seq), row_to_json(row).dump()});
  }
  kv_.apply(ops);
}

void KbStore::apply_delete(const ProfileId& id) {
  if (kv_.contains(marker_key(id))) --profiles_;
  std::vector<KvOp> ops;
  kv_.scan_prefix(marker_key(id), [&](const std::string& k, const std::string&) {
    ops.push_back(KvOp{KvOp::Kind::erase, k, {}});
    return true;
  });
  kv_.apply(ops);
}

void KbStore::put_profile(const Profile& p) {
  auto rows = to_rows(p);
  std::unique_lock lock(mu_);
  if (log_.is_open()) {
    log_.append(json{{"op", "put"}, {"profile_id", p.id.str()}, {"rows", rows.size()}}.dump());
    for (const auto& row : rows) log_.append(row_to_json(row).dump());
    log_.flush();
  }
  apply_put(p.id, rows);
  ++generation_;
}

std::vector<NodeRow> KbStore::rows_locked(const ProfileId& id, bool& registered) const {
  std::vector<NodeRow> rows;
  registered = false;
  auto marker = marker_key(id);
  kv_.scan_prefix(marker, [&](const std::string& k, const std::string& v) {
    if (k.size() == marker.size()) {
      registered = true;
    } else {
      rows.push_back(row_from_json(json::parse(v)));
    }
    return true;
  });
  return rows;
}

std::optional<Profile> KbStore::find_profile(const ProfileId& id) const {
  std::shared_lock lock(mu_);
  bool registered = false;
  auto rows = rows_locked(id, registered);
  if (!registered) return std::nullopt;
  return from_rows(id, rows);
}

Profile KbStore::get_profile(const ProfileId& id) const {
  auto p = find_profile(id);
  if (!p) throw Error(ErrorCode::NotFound, "profile '" + id.str() + "' not found");
  return std::move(*p);
}

bool KbStore::contains(const ProfileId& id) const {
  std::shared_lock lock(mu_);
  return kv_.contains(marker_key(id));
}

void KbStore::delete_profile(const ProfileId& id) {
  std::unique_lock lock(mu_);
  if (!kv_.contains(marker_key(id))) return;
  if (log_.is_open()) {
    log_.append(json{{"op", "delete"}, {"profile_id", id.str()}}.dump());
    log_.flush();
  }
  apply_delete(id);
  ++generation_;
}

void KbStore::for_each_profile(const std::function<void(const Profile&)>& fn) const {
  std::shared_lock lock(mu_);
  std::optional<ProfileId> current;
  std::vector<NodeRow> rows;
  auto flush = [&] {
    if (current) fn(from_rows(*current, rows));
    rows.clear();
  };
  kv_.scan_all([&](const std::string& k, const std::string& v) {
    auto nul = k.find('\0');
    if (nul + 1 == k.size()) {
      flush();
      current = ProfileId(k.substr(0, nul));
    } else {
      rows.push_back(row_from_json(json::parse(v)));
    }
    return true;
  });
  flush();
}

std::vector<Profile> KbStore::scan_profiles() const {
  std::vector<Profile> out;
  for_each_profile([&](const Profile& p) { out.push_back(p); });
  return out;
}

std::vector<ProfileId> KbStore::ids() const {
  std::shared_lock lock(mu_);
  std::vector<ProfileId> out;
  kv_.scan_all([&](const std::string& k, const std::string&) {
    auto nul = k.find('\0');
    if (nul + 1 == k.size()) out.emplace_back(k.substr(0, nul));
    return true;
  });
  return out;
}

std::vector<NodeRow> KbStore::rows_of(const ProfileId& id) const {
  std::shared_lock lock(mu_);
  bool registered = false;
  return rows_locked(id, registered);
}

std::size_t KbStore::row_count() const {
  std::shared_lock lock(mu_);
  return kv_.size() - profiles_;
}

std::size_t KbStore::profile_count() const {
  std::shared_lock lock(mu_);
  return profiles_;
}

std::uint64_t KbStore::generation() const {
  std::shared_lock lock(mu_);
  return generation_;
}

void KbStore::checkpoint() {
  std::unique_lock lock(mu_);
  if (dir_.empty()) return;
  std::vector<std::string> frames;
  frames.push_back(json{{"op", "header"}, {"generation", generation_}}.dump());
  std::optional<std::string> current;
  std::vector<std::string> rows;
  auto flush = [&] {
    if (!current) return;
    frames.push_back(json{{"op", "put"}, {"profile_id", *current}, {"rows", rows.size()}}.dump());
    for (auto& r : rows) frames.push_back(std::move(r));
    rows.clear();
  };
  kv_.scan_all([&](const std::string& k, const std::string& v) {
    auto nul = k.find('\0');
    if (nul + 1 == k.size()) {
      flush();
      current = k.substr(0, nul);
    } else {
      rows.push_back(v);
    }
    return true;
  });
  flush();
  FramedLog::write_atomic(dir_ / "snapshot", frames);
  log_.truncate();
}

}  // namespace provlink
