#include "provlink/error.hpp"

namespace provlink {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::EmptyKey: return "EmptyKey";
    case ErrorCode::EmptyValue: return "EmptyValue";
    case ErrorCode::InvalidProvenance: return "InvalidProvenance";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::SameId: return "SameId";
    case ErrorCode::BelowThreshold: return "BelowThreshold";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::MalformedQuery: return "MalformedQuery";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::MappingError: return "MappingError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Conflict: return "Conflict";
  }
  return "Unknown";
}

}  // namespace provlink
