#pragma once

#include <string>
#include <vector>

#include "fracsing/field.hpp"
#include "fracsing/model.hpp"
#include "fracsing/quadrature.hpp"

namespace fracsing {

/// Default angular rule for energies: hemisphere_rule(n, s, k).
QuadRule energy_rule(const Params& params, int k = 128);

/// E(r; U). Fields need either a polar evaluator (U, dU/drho, W on the
/// hemisphere, as built by singular_extension) or a solved polar grid.
/// The u^{p+1} term carries the factor neumann_factor(s) of the boundary
/// condition, so E is monotone along solutions in this library's scaling.
double energy_at(const AxiField& U, double r, const Params& params, const QuadRule& rule);

/// J1 r^{2(p+1)s/(p-1) - n} int t^{1-2s} (dU/dnu + beta U / r)^2 over the
/// hemisphere of radius r, evaluated as written.
double energy_derivative(const AxiField& U, double r, const Params& params, const QuadRule& rule);

struct EnergyCurve {
  std::vector<double> radii;
  std::vector<double> E_values;
  std::vector<double> dE_formula;
  std::vector<double> dE_fd;
  std::vector<double> dE_fd_noise;  // truncation + rounding estimate of dE_fd
  std::vector<bool> monotone_ok;    // entry i: E(r_i) >= E(r_{i-1}) - tol; entry 0 is true
};

struct EnergyOptions {
  int quad_order = 128;
  double monotone_tol = 1e-8;  // relative to max |E| over the curve
  double fd_step = 1e-3;       // log-radius step for evaluator fields
};

/// Geometric samples over [r_lo, r_hi]. For grid fields the finite
/// difference uses the grid's log-radius spacing.
EnergyCurve energy_curve(const AxiField& U, Interval r_range, int samples, const Params& params,
                         const EnergyOptions& opts = {});

/// CSV `r,E,dE_formula,dE_fd,monotone_ok`.
void write_energy_curve(const EnergyCurve& curve, const std::string& csv_path);

/// E(lambda s; U) - E(s; U^lambda) with U^lambda from rescale().
double scaling_residual(const AxiField& U, double lambda, double s, const Params& params,
                        const QuadRule& rule);

struct EnergyLimitOptions {
  double r_start = 0.0;  // 0: the outermost usable radius (1 for evaluator fields)
  int max_levels = 40;   // radii r_start 2^{-k}
  double tol = 1e-8;     // agreement of three successive Aitken extrapolants
  int quad_order = 128;
};

struct EnergyLimit {
  double value;
  double error;
  std::vector<double> radii;
  std::vector<double> energies;
};

/// E(0+) from E along r_start 2^{-k}, Aitken-accelerated. Throws
/// NonconvergentSequence when the sequence increases toward 0 (beyond
/// rounding) or the extrapolants do not settle.
EnergyLimit energy_limit(const AxiField& U, const Params& params, const EnergyLimitOptions& opts = {});

}  // namespace fracsing
