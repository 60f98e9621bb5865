#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace neumax {

enum class ErrorKind {
  NegativeDensity,
  SpaceMismatch,
  InvalidArgument,
  NotUnivalent,
  ZeroMass,
  NonConvergence,
  EvaluationOutsideCap,
  GridMismatch,
  NotFound,
  DegenerateField,
  EvenDimension,
  NotMultiple,
  DimensionUnsupported,
  InvalidSpec,
  NeckTooNarrow,
  DegenerateTriangle,
  NoConvergence,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotUnivalent: return "NotUnivalent";
    case ErrorKind::ZeroMass: return "ZeroMass";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::EvaluationOutsideCap: return "EvaluationOutsideCap";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::EvenDimension: return "EvenDimension";
    case ErrorKind::NotMultiple: return "NotMultiple";
    case ErrorKind::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::NeckTooNarrow: return "NeckTooNarrow";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace neumax
