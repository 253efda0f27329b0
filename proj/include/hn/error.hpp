#pragma once

#include <stdexcept>
#include <string>

namespace hn {

enum class ErrorCode {
  Parse,
  Invalid,
  Divergent,
  NonConvergent,
  RejectedDependsOnInactiveVariable,
  RejectedDegree,
  RejectedNegative,
  NotDecomposable,
  UnsupportedBase,
  StepTooLarge,
  Domain,
  Io,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Invalid: return "Invalid";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::RejectedDependsOnInactiveVariable: return "RejectedDependsOnInactiveVariable";
    case ErrorCode::RejectedDegree: return "RejectedDegree";
    case ErrorCode::RejectedNegative: return "RejectedNegative";
    case ErrorCode::NotDecomposable: return "NotDecomposable";
    case ErrorCode::UnsupportedBase: return "UnsupportedBase";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace hn
