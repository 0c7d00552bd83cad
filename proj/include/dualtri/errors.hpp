#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dualtri {

enum class ErrorCode {
  InvalidParameter,
  DegenerateSpring,
  NoEquilibrium,
  ControlSingularity,
  OffsetOutOfRange,
  JointLimitExceeded,
  Unreachable,
  SingularConfiguration,
  MaxIterationsExceeded,
  UnstableUnderLoad,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DegenerateSpring: return "DegenerateSpring";
    case ErrorCode::NoEquilibrium: return "NoEquilibrium";
    case ErrorCode::ControlSingularity: return "ControlSingularity";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::JointLimitExceeded: return "JointLimitExceeded";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::SingularConfiguration: return "SingularConfiguration";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::UnstableUnderLoad: return "UnstableUnderLoad";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace dualtri
