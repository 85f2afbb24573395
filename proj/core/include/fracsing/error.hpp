#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracsing {

/// Failure categories surfaced by the library. The CLI maps these onto
/// exit codes; tests match on them directly.
enum class ErrorCode {
  DimensionTooSmall,
  SigmaOutOfRange,
  PBelowSerrin,
  PSupercritical,
  PoleAtNonpositiveInteger,
  NumeratorPole,
  BetaOutOfRange,
  KOutOfRange,
  NonFiniteSample,
  MissingEvaluator,
  UndeclaredTailBehavior,
  QuadratureNonconvergence,
  EmptyWindow,
  TNonpositive,
  NonconvergentExtrapolation,
  NewtonDivergence,
  NegativeIterate,
  InvalidGeometry,
  ROutsideField,
  DerivativeStencilFailure,
  NonconvergentSequence,
  ImageOutsideDomain,
  ExcludedPoint,
  EmptyScanSet,
  EmptyDomain,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fracsing
