#pragma once

#include <functional>
#include <vector>

#include "fracsing/field.hpp"
#include "fracsing/model.hpp"
#include "fracsing/trace.hpp"

namespace fracsing {

/// Extension kernel P(d, t) = normalization * t^{2s} / (d^2 + t^2)^{(n+2s)/2}.
struct KernelSpec {
  int n;
  double sigma;
  double normalization;
};

/// The normalization is obtained by integrating the unnormalized kernel
/// numerically (rule of order k), not from the Gamma closed form.
KernelSpec make_kernel_spec(int n, double sigma, int k = 128);

double poisson_kernel(const KernelSpec& spec, double x_dist, double t);

struct ExtensionOptions {
  int points_per_panel = 24;
  double tol = 1e-9;  // relative, q against q+8 points per panel
};

/// Poisson extension of a radial trace at the requested (s, t) points
/// (t > 0). The returned field keeps an evaluator that recomputes the
/// integral anywhere; at t = 0 it returns the trace itself.
AxiField extend_trace(const RadialTrace& u, const KernelSpec& spec,
                      const std::vector<std::pair<double, double>>& points,
                      const ExtensionOptions& opts = {});

struct NeumannOptions {
  double t0 = 0.25;     // first height, relative to s0
  int levels = 12;      // heights t0 * 2^{-j}
  double tol = 1e-7;    // relative agreement of successive extrapolants
};

/// -lim_{t->0} t^{1-2s} dU/dt at (s0, 0). Evaluator fields: generalized
/// Richardson on difference quotients in z = t^{2s}/(2s). Grid fields from
/// solve_nonlinear_annulus: the discrete flux balance of the boundary cell.
double neumann_trace(const AxiField& U, double s0, const Params& params,
                     const NeumannOptions& opts = {});
/// Same limit for any function of (t) alone; used for non-axisymmetric fields.
double neumann_limit(const std::function<double(double t)>& U_of_t, double s_scale, double sigma,
                     const NeumannOptions& opts = {});

/// Exact homogeneous extension of u_A = A r^{-beta}:
/// U = rho^{-beta} Theta(theta) with Theta a Gauss hypergeometric function
/// of cos^2(theta), Theta(0) = A, regular on the axis. Its weighted normal
/// flux is neumann_factor(s) * A^p rho^{-beta p}.
AxiField singular_extension(const Params& params);

struct DirichletData {
  std::function<double(double theta)> inner;
  std::function<double(double theta)> outer;
};

struct SolveOptions {
  int n_xi = 256;
  int n_eta = 128;
  double tol = 1e-9;   // scaled residual, relative to max U
  int max_newton = 40;
};

struct SolveReport {
  int newton_iterations = 0;
  std::vector<double> residual_history;
  std::vector<int> halvings;   // damping halvings per Newton step
  int projected_nodes = 0;     // negative iterates set to zero
  double final_residual = 0.0;
};

struct AnnulusSolution {
  AxiField field;
  SolveReport report;
};

/// Finite-volume solve of div(t^{1-2s} grad U) = 0 in the half-annulus
/// inner_r < |X| < outer_r, U given on both half-circles and
/// -t^{1-2s} dU/dt = neumann_factor(s) U^p on t = 0.
AnnulusSolution solve_nonlinear_annulus(const Params& params, double inner_r, double outer_r,
                                        const DirichletData& dirichlet,
                                        const SolveOptions& opts = {});

/// Discrete weighted-divergence residuals of a solved grid field, scaled as
/// in SolveOptions::tol; first the interior rows, then the t = 0 rows.
struct DiscreteResiduals {
  double interior;
  double boundary;
};
DiscreteResiduals discrete_residuals(const AxiField& U, const Params& params);

}  // namespace fracsing
