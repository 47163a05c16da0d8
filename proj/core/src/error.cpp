#include "benchbias/error.hpp"

#include <sstream>

namespace benchbias {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MismatchedPrompts: return "MismatchedPrompts";
    case ErrorCode::DuplicateIds: return "DuplicateIds";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonBinaryInput: return "NonBinaryInput";
    case ErrorCode::UndefinedSimilarity: return "UndefinedSimilarity";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::DegenerateRegressor: return "DegenerateRegressor";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::PartialFailure: return "PartialFailure";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i != 0) out << ", ";
    out << ids[i];
  }
  out << ']';
  return out.str();
}

std::string location_message(const std::string& source, std::size_t line, std::size_t column,
                             const std::string& what) {
  std::ostringstream out;
  out << source << ':' << line;
  if (column != 0) out << ':' << column;
  out << ": " << what;
  return out.str();
}

}  // namespace

MismatchedPromptsError::MismatchedPromptsError(std::vector<std::string> missing_in_performance,
                                               std::vector<std::string> missing_in_embeddings)
    : Error(ErrorCode::MismatchedPrompts,
            "missing_in_performance=" + join_ids(missing_in_performance) +
                " missing_in_embeddings=" + join_ids(missing_in_embeddings)),
      missing_in_perf_(std::move(missing_in_performance)),
      missing_in_emb_(std::move(missing_in_embeddings)) {}

ParseError::ParseError(std::string source, std::size_t line, std::size_t column,
                       const std::string& what)
    : Error(ErrorCode::ParseError, location_message(source, line, column, what)),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

PartialFailureError::PartialFailureError(std::vector<std::string> failed_ids,
                                         const std::string& detail)
    : Error(ErrorCode::PartialFailure, detail + " failed_ids=" + join_ids(failed_ids)),
      failed_ids_(std::move(failed_ids)) {}

}  // namespace benchbias
