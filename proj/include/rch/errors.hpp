#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rch {

enum class ErrorKind {
  NotSkew,
  NotRotation,
  Degenerate,
  InvalidArgument,
  VariantMismatch,
  ControlOutsideW,
  SingularInertia,
  DegenerateGain,
  DimensionMismatch,
  NonFinite,
  EmptyTrajectory,
  MissingDiagnostic,
  ParseError,
  ValidationError,
  IoError,
};

inline const char* to_string(ErrorKind kind);

/// Single exception type for the toolkit; `kind()` distinguishes failure modes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  Error(ErrorKind kind, const std::string& what, std::size_t step)
      : Error(kind, what + " (step " + std::to_string(step) + ")") {
    step_ = step;
    detail_ = what;
  }

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix or step suffix.
  const std::string& detail() const noexcept { return detail_; }
  /// Integration step at which a NonFinite error was raised, when known.
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<std::size_t> step_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSkew: return "NotSkew";
    case ErrorKind::NotRotation: return "NotRotation";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::VariantMismatch: return "VariantMismatch";
    case ErrorKind::ControlOutsideW: return "ControlOutsideW";
    case ErrorKind::SingularInertia: return "SingularInertia";
    case ErrorKind::DegenerateGain: return "DegenerateGain";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorKind::MissingDiagnostic: return "MissingDiagnostic";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rch
