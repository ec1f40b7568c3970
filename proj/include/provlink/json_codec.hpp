#pragma once

// JSON forms of the model types. Output keeps field order as written below. The profile form is the JSONL ingest schema:
//   {"id":"P1","attributes":[{"key":..,"value":..,"prov":[{"pkey":..,"pvalue":..}]}],
//    "relations":[{"key":..,"target":..,"prov":[..]}]}

#include <nlohmann/json.hpp>

#include "provlink/profile.hpp"

namespace provlink {

nlohmann::ordered_json prov_to_json(const Provenance& prov);
Provenance prov_from_json(const nlohmann::json& j);

nlohmann::ordered_json profile_to_json(const Profile& p);
// Throws SchemaError on structural problems; model errors (InvalidId,
// EmptyValue, ...) propagate from make_profile.
Profile profile_from_json(const nlohmann::json& j);

nlohmann::ordered_json edge_to_json(const SimilarityEdge& e);

}  // namespace provlink
