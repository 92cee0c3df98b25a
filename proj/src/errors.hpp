#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace dirtrend {

/// Error categories surfaced through the C API as dt_status codes and by the
/// CLI as exit codes (input errors vs. numerical failures).
enum class ErrorCode {
  InvalidArgument,
  Parse,
  Io,
  Dimension,
  DegenerateRow,
  NoConvergence,
  Domain,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(ErrorCode code, std::string message, long index)
      : std::runtime_error(std::move(message)), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }

  /// Offending row/line index when the error is tied to one (0-based rows for
  /// matrices, 1-based lines for CSV input).
  std::optional<long> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<long> index_;
};

}  // namespace dirtrend
