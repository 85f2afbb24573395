#pragma once

#include <optional>

#include "fracsing/error.hpp"

namespace fracsing {

/// A validated triple (n, sigma, p) in the subcritical range
/// n/(n-2 sigma) < p < (n+2 sigma)/(n-2 sigma). Only constructible through
/// validate_params, so holding a Params is proof of admissibility.
class Params {
 public:
  int n() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }
  double p() const noexcept { return p_; }

  /// n - 2 sigma, the homogeneity gap of the sigma-harmonic power.
  double gap() const noexcept { return n_ - 2.0 * sigma_; }
  /// 2 sigma / (p - 1), the decay exponent of singular solutions.
  double beta() const noexcept { return 2.0 * sigma_ / (p_ - 1.0); }

  double serrin_exponent() const noexcept { return n_ / gap(); }
  double critical_exponent() const noexcept { return (n_ + 2.0 * sigma_) / gap(); }

  friend Params validate_params(int n, double sigma, double p);

 private:
  Params(int n, double sigma, double p) : n_(n), sigma_(sigma), p_(p) {}

  int n_;
  double sigma_;
  double p_;
};

/// Throws Error with DimensionTooSmall, SigmaOutOfRange, PBelowSerrin or
/// PSupercritical. Both endpoints of the p-range are rejected.
Params validate_params(int n, double sigma, double p);

/// Non-throwing variant for sweeps; returns the code of the first violated bound.
std::optional<ErrorCode> check_params(int n, double sigma, double p) noexcept;

struct DerivedConstants {
  double beta;    // 2 sigma / (p - 1)
  double p_star;  // n + 2 sigma - p (n - 2 sigma)
  double J1;      // 4 sigma / (p - 1) - (n - 2 sigma)
  double alpha;   // (n - 2 sigma)/2 - 2 sigma/(p - 1)
  double A;       // asymptotic constant
};

DerivedConstants derived_constants(const Params& params);

}  // namespace fracsing
