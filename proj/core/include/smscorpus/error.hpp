#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smscorpus {

enum class ErrorCode {
  invalid_argument,
  undecodable,
  no_schema,
  malformed,
  missing_code,
  count_out_of_bounds,
  empty_slot,
  zero_messages,
  duplicate_id,
  not_found,
  referential,
  invariant_violation,
  conflict,
  missing_profile,
  unauthorized,
  payload_too_large,
  non_monotone_version,
  shrinking_corpus,
  schema_violation,
  incomparable_versions,
  digest_mismatch,
  io,
  storage,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a stable machine-readable code.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the channel parsers and the release XML reader.
class ParseError : public CorpusError {
 public:
  ParseError(ErrorCode code, const std::string& detail, std::size_t line = 0,
             std::size_t column = 0)
      : CorpusError(code, detail), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace smscorpus
