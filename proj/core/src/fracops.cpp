#include "fracsing/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracsing/quadrature.hpp"
#include "fracsing/specfun.hpp"

namespace fracsing {

namespace {

// int_0^1 [v(1-v)]^m (delta + 2 b v)^{-q} dv: the angular part of the
// kernel |x - y|^{-n-2s} at |x| = r0, |y| = rho after v = sin^2(phi/2).
double angular_kernel(double delta, double b, double m, double q, int pts) {
  if (b == 0.0) return std::pow(delta, -q) * beta_fn(m + 1.0, m + 1.0);
  const double kappa = delta / (2.0 * b);
  auto f = [&](double v) { return std::pow(delta + 2.0 * b * v, -q); };
  if (kappa >= 1.0) {
    const QuadRule jac = gauss_jacobi(pts, m, m);
    double sum = 0.0;
    // (1-x)^m (1+x)^m on [-1,1] with v = (1+x)/2 gives 2^{-2m-1}
    for (std::size_t i = 0; i < jac.size(); ++i) sum += jac.weights[i] * f(0.5 * (1.0 + jac.nodes[i]));
    return sum * std::pow(2.0, -2.0 * m - 1.0);
  }
  GradedOptions go;
  go.points_per_panel = pts;
  const QuadRule lower = graded_rule(0.0, 0.5, EndGrading{m, kappa}, std::nullopt, go);
  const QuadRule upper = graded_rule(0.5, 1.0, std::nullopt, EndGrading{m, 0.5}, go);
  double sum = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const double v = lower.nodes[i];
    sum += lower.weights[i] * std::pow(v * (1.0 - v), m) * f(v);
  }
  for (std::size_t i = 0; i < upper.size(); ++i) {
    const double v = upper.nodes[i];
    sum += upper.weights[i] * std::pow(v * (1.0 - v), m) * f(v);
  }
  return sum;
}

struct Accum {
  double value = 0.0;
  double magnitude = 0.0;
};

// Symmetrized radial integral over (rho_min, r0) for a given panel order.
Accum pv_core(const RadialTrace& u, double r0, int n, double sigma, double rho_min, int pts) {
  const double m = (n - 3.0) / 2.0;
  const double q = (n + 2.0 * sigma) / 2.0;
  const double gap = n - 2.0 * sigma;
  const double ang = sphere_area(n - 1) * std::pow(2.0, n - 2.0);
  const double u0 = u(r0);

  GradedOptions go;
  go.points_per_panel = pts;
  const double split = 0.5 * r0;
  // geometric toward rho_min (smooth power laws), Jacobi toward r0
  const QuadRule inner = graded_rule(rho_min, split, EndGrading{0.0, rho_min * (1.0 / go.ratio - 1.0)},
                                     std::nullopt, go);
  // One Jacobi panel on the diagonal side: the symmetrized integrand is
  // eps^{1-2s} times a function analytic on a disc of radius ~r0, so a
  // moderate order converges fast, while a higher order would only put
  // nodes closer to r0 where u0 - u(rho) cancels and the kernel amplifies
  // the rounding.
  GradedOptions diag = go;
  diag.points_per_panel = std::max(8, pts / 2);
  const QuadRule outer =
      graded_rule(split, r0, std::nullopt, EndGrading{1.0 - 2.0 * sigma, r0 - split}, diag);

  Accum acc;
  auto add = [&](const QuadRule& rule) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double rho = rule.nodes[i];
      const double delta = (r0 - rho) * (r0 - rho);
      const double kernel = ang * angular_kernel(delta, 2.0 * r0 * rho, m, q, pts);
      const double mirror = std::pow(r0 / rho, gap);
      const double near = u0 - u(rho);
      const double far = mirror * (u0 - u(r0 * r0 / rho));
      const double jac = std::pow(rho, n - 1.0) * kernel;
      const double term = jac * (near + far);
      if (!std::isfinite(term)) {
        std::ostringstream msg;
        msg << "non-finite principal-value integrand at rho = " << rho;
        throw Error(ErrorCode::QuadratureNonconvergence, msg.str());
      }
      acc.value += rule.weights[i] * term;
      acc.magnitude += rule.weights[i] * jac * (std::abs(near) + std::abs(far));
    }
  };
  add(inner);
  add(outer);
  return acc;
}

}  // namespace

PVResult frac_laplacian_radial(const RadialTrace& u, double r0, int n, double sigma,
                               const PVOptions& opts) {
  if (!u.has_evaluator()) {
    throw Error(ErrorCode::MissingEvaluator, "principal-value integral needs a closed-form trace");
  }
  if (!u.tails) {
    throw Error(ErrorCode::UndeclaredTailBehavior, "trace declares no power-law tails");
  }
  if (!(r0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "r0 must be positive");
  if (n < 2) throw Error(ErrorCode::DimensionTooSmall, "n >= 2 required");
  if (!(sigma > 0.0 && sigma < 1.0)) throw Error(ErrorCode::SigmaOutOfRange, "0 < sigma < 1");
  const TailSpec tails = *u.tails;
  if (!(tails.beta_left < n) || !(tails.beta_right > -2.0 * sigma)) {
    throw Error(ErrorCode::UndeclaredTailBehavior,
                "declared tails make the integral diverge (need beta_left < n, beta_right > -2s)");
  }

  const double rho_min = opts.inner_cutoff * r0;
  const Accum lo = pv_core(u, r0, n, sigma, rho_min, opts.points_per_panel);
  const Accum hi = pv_core(u, r0, n, sigma, rho_min, opts.points_per_panel + 8);

  // (0, rho_min): kernel frozen at rho = 0, trace continued by its tails.
  const double u0 = u(r0);
  const double gap = n - 2.0 * sigma;
  const double kernel0 = sphere_area(n) * std::pow(r0, -(n + 2.0 * sigma));
  const double big = r0 * r0 / rho_min;
  const double c_left = u(rho_min) * std::pow(rho_min, tails.beta_left);
  const double c_right = u(big) * std::pow(big, tails.beta_right);
  const double left_part = u0 * std::pow(rho_min, n) / n -
                           c_left * std::pow(rho_min, n - tails.beta_left) / (n - tails.beta_left);
  const double right_part =
      std::pow(r0, gap) *
      (u0 * std::pow(rho_min, 2.0 * sigma) / (2.0 * sigma) -
       c_right * std::pow(r0, -2.0 * tails.beta_right) *
           std::pow(rho_min, 2.0 * sigma + tails.beta_right) / (2.0 * sigma + tails.beta_right));
  const double tail = kernel0 * (left_part + right_part);

  const double c = frac_laplacian_constant(n, sigma);
  const double value = c * (hi.value + tail);
  const double error = c * std::abs(hi.value - lo.value);
  const double scale = c * std::max(std::abs(hi.value + tail), hi.magnitude);
  if (error > opts.tol * scale + 1e-300) {
    std::ostringstream msg;
    msg << "principal-value integral at r0 = " << r0 << " did not settle: |I_q - I_{q+8}| = "
        << error << " against scale " << scale;
    throw Error(ErrorCode::QuadratureNonconvergence, msg.str());
  }
  return {value, error};
}

PVResult frac_laplacian_radial(const RadialTrace& u, double r0, const Params& params,
                               const PVOptions& opts) {
  return frac_laplacian_radial(u, r0, params.n(), params.sigma(), opts);
}

std::vector<double> pde_residual(const RadialTrace& u, const Params& params,
                                 const std::vector<double>& test_radii, const PVOptions& opts) {
  std::vector<double> out;
  out.reserve(test_radii.size());
  for (double r : test_radii) {
    const double lap = frac_laplacian_radial(u, r, params, opts).value;
    out.push_back(lap - std::pow(u(r), params.p()));
  }
  return out;
}

RadialTrace singular_solution_trace(const Params& params) {
  const double a = asymptotic_constant(params);
  const double beta = params.beta();
  return make_trace([a, beta](double r) { return a * std::pow(r, -beta); },
                    log_grid(1e-6, 1e6, 241), TailSpec{beta, beta}, -beta);
}

Bounds bounds_check(const RadialTrace& u, const Params& params, double lo, double hi) {
  const double beta = params.beta();
  Bounds b{INFINITY, -INFINITY};
  bool any = false;
  for (std::size_t i = 0; i < u.radii.size(); ++i) {
    const double r = u.radii[i];
    if (r < lo || r > hi) continue;
    const double w = std::pow(r, beta) * u.values[i];
    b.c1 = std::min(b.c1, w);
    b.c2 = std::max(b.c2, w);
    any = true;
  }
  if (!any) {
    std::ostringstream msg;
    msg << "no samples in [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::EmptyWindow, msg.str());
  }
  return b;
}

}  // namespace fracsing
