#ifndef BENCHBIAS_ERROR_HPP
#define BENCHBIAS_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace benchbias {

enum class ErrorCode {
  MismatchedPrompts,
  DuplicateIds,
  ParseError,
  RangeError,
  DimensionMismatch,
  ZeroVector,
  LengthMismatch,
  NonBinaryInput,
  UndefinedSimilarity,
  EmptyInput,
  InvalidShape,
  DegenerateInput,
  InvalidK,
  SingleCluster,
  DegenerateRegressor,
  TooFewObservations,
  InvalidConfig,
  NetworkError,
  AuthError,
  PartialFailure,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is
/// stable and meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class MismatchedPromptsError : public Error {
 public:
  MismatchedPromptsError(std::vector<std::string> missing_in_performance,
                         std::vector<std::string> missing_in_embeddings);

  const std::vector<std::string>& missing_in_performance() const noexcept { return missing_in_perf_; }
  const std::vector<std::string>& missing_in_embeddings() const noexcept { return missing_in_emb_; }

 private:
  std::vector<std::string> missing_in_perf_;
  std::vector<std::string> missing_in_emb_;
};

/// Location is 1-based; column 0 means "whole line".
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column, const std::string& what);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string source_;
  std::size_t line_;
  std::size_t column_;
};

class PartialFailureError : public Error {
 public:
  PartialFailureError(std::vector<std::string> failed_ids, const std::string& detail);

  const std::vector<std::string>& failed_ids() const noexcept { return failed_ids_; }

 private:
  std::vector<std::string> failed_ids_;
};

}  // namespace benchbias

#endif  // BENCHBIAS_ERROR_HPP
