#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cocyclelab {

/// Failure categories shared by every module. The numeric values are part of
/// the C API (see cocyclelab.h) and must stay stable.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  ConfigError = 2,
  IoError = 3,
  UnknownName = 4,
  IncompatibleBase = 5,
  NotAperiodic = 6,
  HorizonExhausted = 7,
  EmptyTower = 8,
  SingularGenerator = 9,
  WindowUnderflow = 10,
  Degenerate = 11,
  IllConditioned = 12,
  NotInvertible = 13,
  Inconclusive = 14,
  NotHyperbolic = 15,
  UnstableNotInvertible = 16,
  Violation = 17,
  WindowTooSmall = 18,
  TailTooLarge = 19,
  SingularSystem = 20,
  NoDecay = 21,
  NoCandidate = 22,
  NotDegenerate = 23,
  RatioNotAchieved = 24,
  BudgetViolated = 25,
  NoConvergence = 26,
  MissingArtifact = 27,
  Internal = 99,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

inline std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::IncompatibleBase: return "IncompatibleBase";
    case ErrorCode::NotAperiodic: return "NotAperiodic";
    case ErrorCode::HorizonExhausted: return "HorizonExhausted";
    case ErrorCode::EmptyTower: return "EmptyTower";
    case ErrorCode::SingularGenerator: return "SingularGenerator";
    case ErrorCode::WindowUnderflow: return "WindowUnderflow";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::UnstableNotInvertible: return "UnstableNotInvertible";
    case ErrorCode::Violation: return "Violation";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoDecay: return "NoDecay";
    case ErrorCode::NoCandidate: return "NoCandidate";
    case ErrorCode::NotDegenerate: return "NotDegenerate";
    case ErrorCode::RatioNotAchieved: return "RatioNotAchieved";
    case ErrorCode::BudgetViolated: return "BudgetViolated";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace cocyclelab
