#pragma once

#include <vector>

#include "fracsing/model.hpp"
#include "fracsing/trace.hpp"

namespace fracsing {

struct PVOptions {
  int points_per_panel = 24;
  /// Accept when |I_q - I_{q+8}| <= tol * max(|I|, int |integrand|).
  double tol = 1e-8;
  /// Relative cut-off radius below which the integrand is closed in
  /// closed form from the declared tails.
  double inner_cutoff = 1e-10;
};

struct PVResult {
  double value;
  double error;  // absolute estimate
};

/// (-Delta)^s u at |x| = r0 for a radial u with an evaluator and declared
/// tails, by the principal-value integral with the constant
/// C(n, s) = 2^{2s} s Gamma((n+2s)/2) / (pi^{n/2} Gamma(1-s)).
PVResult frac_laplacian_radial(const RadialTrace& u, double r0, int n, double sigma,
                               const PVOptions& opts = {});
PVResult frac_laplacian_radial(const RadialTrace& u, double r0, const Params& params,
                               const PVOptions& opts = {});

/// (-Delta)^s u(r) - u(r)^p at each radius.
std::vector<double> pde_residual(const RadialTrace& u, const Params& params,
                                 const std::vector<double>& test_radii,
                                 const PVOptions& opts = {});

/// u_A(r) = A r^{-beta}, sampled on 1e-6..1e6 with homogeneity -beta.
RadialTrace singular_solution_trace(const Params& params);

struct Bounds {
  double c1;
  double c2;
};

/// inf and sup of r^beta u(r) over the samples with lo <= r <= hi.
Bounds bounds_check(const RadialTrace& u, const Params& params, double lo, double hi);

}  // namespace fracsing
