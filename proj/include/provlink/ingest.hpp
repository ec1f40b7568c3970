#pragma once

// Ingestion of external records into profiles: the JSONL profile schema,
// mapped CSV tables, and pre-extracted (subject, relation, object) triples.
// Bad lines are collected and the rest of the file is still processed.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "provlink/error.hpp"
#include "provlink/linker.hpp"

namespace provlink {

struct LineError {
  std::size_t line = 0;  // 1-based
  ErrorCode code = ErrorCode::SchemaError;
  std::string message;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<LineError> errors;
};

// Throws FileNotFound.
IngestReport ingest_jsonl(Engine& engine, const std::filesystem::path& path);

// CSV column mapping, read from a JSON file:
//   {"id_column": "id", "type": "person",
//    "attributes": {"full_name": "name"},
//    "relations": {"employer": "works_for"},
//    "provenance": {"name_until": {"column": "full_name", "pkey": "until"}}}
struct ProvColumn {
  std::string column;  // attribute or relation column the pair attaches to
  std::string pkey;
};

struct CsvMapping {
  std::string id_column;
  std::string type_value;
  std::map<std::string, std::string> attributes;  // column -> attribute key
  std::map<std::string, std::string> relations;   // column (holding target ids) -> relation key
  std::map<std::string, ProvColumn> provenance;   // column -> owner + pkey

  // Throws MappingError for unknown or doubly mapped columns.
  void validate(const std::vector<std::string>& header) const;

  static CsvMapping from_json(const nlohmann::json& j);  // SchemaError
  static CsvMapping load(const std::filesystem::path& path);
};

// RFC 4180 records: quoted fields may hold commas, doubled quotes and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Throws FileNotFound, or MappingError when the mapping does not fit the header.
IngestReport ingest_csv(Engine& engine, const std::filesystem::path& path,
                        const CsvMapping& mapping);

// `subject<TAB>relation<TAB>object[<TAB>pkey=pvalue;...]` per line. Mentions
// become profiles with a name attribute; accepted counts triples.
IngestReport ingest_triples(Engine& engine, const std::filesystem::path& path);

// "M_" + FNV-1a 64-bit hex digest of the lowercased, whitespace-collapsed mention.
ProfileId mention_id(std::string_view mention);

}  // namespace provlink
