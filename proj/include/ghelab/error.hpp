#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ghelab {

enum class ErrorCode {
  TooShort,
  NonPositivePrice,
  DegenerateSeries,
  TauTooLarge,
  NonPositiveStructureFunction,
  InvalidParams,
  InvalidConfig,
  EmbeddingFailure,
  NonStationaryAR,
  DegenerateVariance,
  MissingShuffledBlock,
  MissingEmpiricalData,
  FileNotFound,
  ParseError,
  EmptySeries,
  UnknownKey,
  TypeError,
  MissingKey,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::TauTooLarge: return "TauTooLarge";
    case ErrorCode::NonPositiveStructureFunction: return "NonPositiveStructureFunction";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmbeddingFailure: return "EmbeddingFailure";
    case ErrorCode::NonStationaryAR: return "NonStationaryAR";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::MissingShuffledBlock: return "MissingShuffledBlock";
    case ErrorCode::MissingEmpiricalData: return "MissingEmpiricalData";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::MissingKey: return "MissingKey";
  }
  return "Unknown";
}

/// Every failure raised by the library. `row` is set for CSV parse errors,
/// `path_index` when an ensemble work item failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }

  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> path_index() const noexcept { return path_index_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

  static Error parse(std::size_t row, const std::string& what) {
    Error e(ErrorCode::ParseError, "row " + std::to_string(row) + ": " + what);
    e.row_ = row;
    return e;
  }

  static Error at_path(const Error& inner, std::size_t index) {
    Error e(inner.code_, "path " + std::to_string(index) + ": " + inner.detail_);
    e.row_ = inner.row_;
    e.path_index_ = index;
    return e;
  }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> path_index_;
};

}  // namespace ghelab
