// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpanm {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  ZeroSignal,
  NotHermitian,
  EigenFailure,
  InvalidParams,
  InvariantViolation,
  SingularGain,
  RankDeficient,
  RankError,
  IllConditioned,
  SeparationInfeasible,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so callers (the CLI, the
// Monte Carlo runner) can record it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::SingularGain: return "SingularGain";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::RankError: return "RankError";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::SeparationInfeasible: return "SeparationInfeasible";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gpanm
