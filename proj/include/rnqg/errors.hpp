#pragma once

#include <stdexcept>
#include <string>

namespace rnqg {

enum class ErrorCode {
  DimensionMismatch,
  NonSymmetricInput,
  NotPositiveDefinite,
  NoStabilizingSolution,
  IllConditioned,
  IndefiniteLam3,
  SingularM6,
  SingularGamma4Core,
  SingularR,
  RankDeficientBasis,
  NonFiniteTarget,
  NoConvergence,
  ControllerFailure,
  NonFiniteState,
  ConfigError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonSymmetricInput: return "NonSymmetricInput";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoStabilizingSolution: return "NoStabilizingSolution";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::IndefiniteLam3: return "IndefiniteLam3";
    case ErrorCode::SingularM6: return "SingularM6";
    case ErrorCode::SingularGamma4Core: return "SingularGamma4Core";
    case ErrorCode::SingularR: return "SingularR";
    case ErrorCode::RankDeficientBasis: return "RankDeficientBasis";
    case ErrorCode::NonFiniteTarget: return "NonFiniteTarget";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ControllerFailure: return "ControllerFailure";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

/// Library-wide exception carrying a machine-checkable code alongside the
/// human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rnqg
