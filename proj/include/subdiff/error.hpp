#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subdiff {

enum class Errc {
  IndeterminateSum,
  DomainViolation,
  DimensionMismatch,
  NonpositiveScale,
  EmptyList,
  EmptyProjection,
  ProxUnavailable,
  NoGradient,
  NotSeparable,
  NotSemiDifferentiable,
  BacktrackExhausted,
  InsufficientTrace,
  DimensionTooLarge,
  NotFeasible,
  UnboundedDirection,
  InvalidArgument,
  Io,
  Parse,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::IndeterminateSum: return "IndeterminateSum";
    case Errc::DomainViolation: return "DomainViolation";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonpositiveScale: return "NonpositiveScale";
    case Errc::EmptyList: return "EmptyList";
    case Errc::EmptyProjection: return "EmptyProjection";
    case Errc::ProxUnavailable: return "ProxUnavailable";
    case Errc::NoGradient: return "NoGradient";
    case Errc::NotSeparable: return "NotSeparable";
    case Errc::NotSemiDifferentiable: return "NotSemiDifferentiable";
    case Errc::BacktrackExhausted: return "BacktrackExhausted";
    case Errc::InsufficientTrace: return "InsufficientTrace";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::NotFeasible: return "NotFeasible";
    case Errc::UnboundedDirection: return "UnboundedDirection";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace subdiff
