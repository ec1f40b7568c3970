#include "provlink/json_codec.hpp"

#include "provlink/error.hpp"

namespace provlink {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const json& require(const json& obj, const char* field, json::value_t type, const char* where) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw Error(ErrorCode::SchemaError, std::string(where) + ": missing \"" + field + "\"");
  }
  if (it->type() != type) {
    throw Error(ErrorCode::SchemaError, std::string(where) + ": \"" + field + "\" has wrong type");
  }
  return *it;
}

const json& optional_array(const json& obj, const char* field, const char* where) {
  static const json empty = json::array();
  auto it = obj.find(field);
  if (it == obj.end()) return empty;
  if (!it->is_array()) {
    throw Error(ErrorCode::SchemaError, std::string(where) + ": \"" + field + "\" must be an array");
  }
  return *it;
}

}  // namespace

ojson prov_to_json(const Provenance& prov) {
  ojson out = ojson::array();
  for (const auto& p : prov) out.push_back({{"pkey", p.pkey}, {"pvalue", p.pvalue}});
  return out;
}

Provenance prov_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, "prov must be an array");
  Provenance out;
  for (const auto& p : j) {
    if (!p.is_object()) throw Error(ErrorCode::SchemaError, "prov entries must be objects");
    out.push_back(ProvPair{require(p, "pkey", json::value_t::string, "prov").get<std::string>(),
                           require(p, "pvalue", json::value_t::string, "prov").get<std::string>()});
  }
  return out;
}

ojson profile_to_json(const Profile& p) {
  ojson attrs = ojson::array();
  for (const auto& a : p.attributes) {
    ojson o = {{"key", a.key}, {"value", a.value}};
    if (!a.prov.empty()) o["prov"] = prov_to_json(a.prov);
    attrs.push_back(std::move(o));
  }
  ojson rels = ojson::array();
  for (const auto& r : p.relations) {
    ojson o = {{"key", r.key}, {"target", r.target.str()}};
    if (!r.prov.empty()) o["prov"] = prov_to_json(r.prov);
    rels.push_back(std::move(o));
  }
  return {{"id", p.id.str()}, {"attributes", std::move(attrs)}, {"relations", std::move(rels)}};
}

Profile profile_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "profile must be a JSON object");
  auto id = require(j, "id", json::value_t::string, "profile").get<std::string>();
  std::vector<AttributeObject> attributes;
  for (const auto& a : optional_array(j, "attributes", "profile")) {
    if (!a.is_object()) throw Error(ErrorCode::SchemaError, "attribute entries must be objects");
    attributes.push_back(AttributeObject{
        require(a, "key", json::value_t::string, "attribute").get<std::string>(),
        require(a, "value", json::value_t::string, "attribute").get<std::string>(),
        prov_from_json(optional_array(a, "prov", "attribute"))});
  }
  std::vector<RelationObject> relations;
  for (const auto& r : optional_array(j, "relations", "profile")) {
    if (!r.is_object()) throw Error(ErrorCode::SchemaError, "relation entries must be objects");
    relations.push_back(RelationObject{
        require(r, "key", json::value_t::string, "relation").get<std::string>(),
        ProfileId(require(r, "target", json::value_t::string, "relation").get<std::string>()),
        prov_from_json(optional_array(r, "prov", "relation"))});
  }
  return make_profile(ProfileId(std::move(id)), std::move(attributes), std::move(relations));
}

ojson edge_to_json(const SimilarityEdge& e) {
  return {{"id1", e.id1.str()},     {"id2", e.id2.str()}, {"simsc", e.simsc},
          {"rejsc", e.rejsc},       {"cfm", e.cfm},
          {"decision", std::string(decision_name(e.decision))}};
}

}  // namespace provlink
