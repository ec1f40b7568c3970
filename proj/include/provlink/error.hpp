#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace provlink {

enum class ErrorCode {
  InvalidId,
  EmptyKey,
  EmptyValue,
  InvalidProvenance,
  InvalidN,
  InvalidEdge,
  NotFound,
  SameId,
  BelowThreshold,
  StorageFailure,
  MalformedQuery,
  SchemaError,
  MappingError,
  FileNotFound,
  ConfigError,
  Conflict,
};

std::string_view error_code_name(ErrorCode code);

// Every failure surfaced by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace provlink
