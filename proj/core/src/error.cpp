#include "fracsing/error.hpp"

namespace fracsing {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionTooSmall: return "dimension-too-small";
    case ErrorCode::SigmaOutOfRange: return "sigma-out-of-range";
    case ErrorCode::PBelowSerrin: return "p-below-serrin";
    case ErrorCode::PSupercritical: return "p-supercritical";
    case ErrorCode::PoleAtNonpositiveInteger: return "pole-at-nonpositive-integer";
    case ErrorCode::NumeratorPole: return "numerator-pole";
    case ErrorCode::BetaOutOfRange: return "beta-out-of-range";
    case ErrorCode::KOutOfRange: return "k-out-of-range";
    case ErrorCode::NonFiniteSample: return "non-finite-sample";
    case ErrorCode::MissingEvaluator: return "missing-evaluator";
    case ErrorCode::UndeclaredTailBehavior: return "undeclared-tail-behavior";
    case ErrorCode::QuadratureNonconvergence: return "quadrature-nonconvergence";
    case ErrorCode::EmptyWindow: return "empty-window";
    case ErrorCode::TNonpositive: return "t-nonpositive";
    case ErrorCode::NonconvergentExtrapolation: return "nonconvergent-extrapolation";
    case ErrorCode::NewtonDivergence: return "newton-divergence";
    case ErrorCode::NegativeIterate: return "negative-iterate";
    case ErrorCode::InvalidGeometry: return "invalid-geometry";
    case ErrorCode::ROutsideField: return "r-outside-field";
    case ErrorCode::DerivativeStencilFailure: return "derivative-stencil-failure";
    case ErrorCode::NonconvergentSequence: return "nonconvergent-sequence";
    case ErrorCode::ImageOutsideDomain: return "image-outside-domain";
    case ErrorCode::ExcludedPoint: return "excluded-point";
    case ErrorCode::EmptyScanSet: return "empty-scan-set";
    case ErrorCode::EmptyDomain: return "empty-domain";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace fracsing
