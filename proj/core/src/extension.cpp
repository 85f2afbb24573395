#include "fracsing/extension.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracsing/quadrature.hpp"
#include "fracsing/specfun.hpp"
#include "fv.hpp"
#include "interp.hpp"

namespace fracsing {

namespace {

// Same angular reduction as the principal-value integral:
// int_0^1 [v(1-v)]^m (delta + 2 b v)^{-q} dv.
double angular_part(double delta, double b, double m, double q, int pts) {
  if (b == 0.0) return std::pow(delta, -q) * beta_fn(m + 1.0, m + 1.0);
  const double kappa = delta / (2.0 * b);
  GradedOptions go;
  go.points_per_panel = pts;
  const QuadRule lower = kappa >= 1.0
                             ? graded_rule(0.0, 0.5, EndGrading{m, 0.5}, std::nullopt, go)
                             : graded_rule(0.0, 0.5, EndGrading{m, kappa}, std::nullopt, go);
  const QuadRule upper = graded_rule(0.5, 1.0, std::nullopt, EndGrading{m, 0.5}, go);
  double sum = 0.0;
  for (const QuadRule* rule : {&lower, &upper}) {
    for (std::size_t i = 0; i < rule->size(); ++i) {
      const double v = rule->nodes[i];
      sum += rule->weights[i] * std::pow(v * (1.0 - v), m) * std::pow(delta + 2.0 * b * v, -q);
    }
  }
  return sum;
}

struct Accum {
  double value = 0.0;
  double magnitude = 0.0;
};

constexpr double kInnerCut = 1e-10;
constexpr double kOuterCut = 1e10;

// int_0^inf rho^{n-1} u(rho) int_{S^{n-1}} (|x - rho w|^2 + t^2)^{-q} dw drho
Accum poisson_radial(const RadialTrace& u, int n, double sigma, double s, double t, int pts) {
  const double m = (n - 3.0) / 2.0;
  const double q = (n + 2.0 * sigma) / 2.0;
  const double ang = sphere_area(n - 1) * std::pow(2.0, n - 2.0);
  const double scale = std::max(s, t);
  const double rho_min = kInnerCut * scale;
  const double rho_max = kOuterCut * scale;

  GradedOptions go;
  go.points_per_panel = pts;
  const double first = rho_min * (1.0 / go.ratio - 1.0);
  std::vector<QuadRule> rules;
  if (s > 2.0 * rho_min && t < s) {
    rules.push_back(graded_rule(rho_min, s, EndGrading{0.0, first}, EndGrading{0.0, t}, go));
    rules.push_back(graded_rule(s, rho_max, EndGrading{0.0, t}, std::nullopt, go));
  } else {
    rules.push_back(graded_rule(rho_min, rho_max, EndGrading{0.0, first}, std::nullopt, go));
  }

  Accum acc;
  for (const QuadRule& rule : rules) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double rho = rule.nodes[i];
      const double delta = (s - rho) * (s - rho) + t * t;
      const double term =
          std::pow(rho, n - 1.0) * u(rho) * ang * angular_part(delta, 2.0 * s * rho, m, q, pts);
      if (!std::isfinite(term)) {
        std::ostringstream msg;
        msg << "non-finite extension integrand at rho = " << rho;
        throw Error(ErrorCode::QuadratureNonconvergence, msg.str());
      }
      acc.value += rule.weights[i] * term;
      acc.magnitude += rule.weights[i] * std::abs(term);
    }
  }

  // closed-form ends from the declared power laws
  const TailSpec tails = *u.tails;
  const double area = sphere_area(n);
  const double c_left = u(rho_min) * std::pow(rho_min, tails.beta_left);
  const double c_right = u(rho_max) * std::pow(rho_max, tails.beta_right);
  const double left = c_left * area * std::pow(s * s + t * t, -q) *
                      std::pow(rho_min, n - tails.beta_left) / (n - tails.beta_left);
  const double right = c_right * area * std::pow(rho_max, -2.0 * sigma - tails.beta_right) /
                       (2.0 * sigma + tails.beta_right);
  acc.value += left + right;
  acc.magnitude += std::abs(left) + std::abs(right);
  return acc;
}

double poisson_value(const RadialTrace& u, const KernelSpec& spec, double s, double t,
                     const ExtensionOptions& opts) {
  if (!(t > 0.0)) throw Error(ErrorCode::TNonpositive, "extension needs t > 0");
  const Accum lo = poisson_radial(u, spec.n, spec.sigma, s, t, opts.points_per_panel);
  const Accum hi = poisson_radial(u, spec.n, spec.sigma, s, t, opts.points_per_panel + 8);
  if (std::abs(hi.value - lo.value) > opts.tol * hi.magnitude) {
    std::ostringstream msg;
    msg << "extension integral at (s, t) = (" << s << ", " << t
        << ") did not settle: difference " << std::abs(hi.value - lo.value);
    throw Error(ErrorCode::QuadratureNonconvergence, msg.str());
  }
  return spec.normalization * std::pow(t, 2.0 * spec.sigma) * hi.value;
}

}  // namespace

KernelSpec make_kernel_spec(int n, double sigma, int k) {
  if (n < 2) throw Error(ErrorCode::DimensionTooSmall, "n >= 2 required");
  if (!(sigma > 0.0 && sigma < 1.0)) throw Error(ErrorCode::SigmaOutOfRange, "0 < sigma < 1");
  // int_{R^n} (|y|^2 + 1)^{-(n+2s)/2} dy = |S^{n-1}| int_0^{pi/2} cos^{n-1} sin^{2s-1}
  const double mass = sphere_area(n) * angular_rule(n - 1.0, 2.0 * sigma - 1.0, k)
                                           .integrate([](double) { return 1.0; });
  return {n, sigma, 1.0 / mass};
}

double poisson_kernel(const KernelSpec& spec, double x_dist, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::TNonpositive, "kernel needs t > 0");
  const double q = (spec.n + 2.0 * spec.sigma) / 2.0;
  return spec.normalization * std::pow(t, 2.0 * spec.sigma) * std::pow(x_dist * x_dist + t * t, -q);
}

AxiField extend_trace(const RadialTrace& u, const KernelSpec& spec,
                      const std::vector<std::pair<double, double>>& points,
                      const ExtensionOptions& opts) {
  if (!u.tails) throw Error(ErrorCode::UndeclaredTailBehavior, "trace declares no tails");
  if (!u.has_evaluator()) throw Error(ErrorCode::MissingEvaluator, "extension needs an evaluator");
  const TailSpec tails = *u.tails;
  if (!(tails.beta_left < spec.n) || !(tails.beta_right > -2.0 * spec.sigma)) {
    throw Error(ErrorCode::UndeclaredTailBehavior, "declared tails make the extension diverge");
  }
  AxiField f;
  f.n = spec.n;
  f.sigma = spec.sigma;
  f.homogeneity = u.homogeneity;
  for (const auto& [s, t] : points) {
    if (s < 0.0) throw Error(ErrorCode::InvalidArgument, "s = |x| must be >= 0");
    f.s.push_back(s);
    f.t.push_back(t);
    f.values.push_back(poisson_value(u, spec, s, t, opts));
  }
  f.evaluator = [u, spec, opts](double s, double t) {
    if (t == 0.0) return u(s);
    return poisson_value(u, spec, s, t, opts);
  };
  return f;
}

double neumann_limit(const std::function<double(double)>& U_of_t, double s_scale, double sigma,
                     const NeumannOptions& opts) {
  const int levels = std::max(opts.levels, 4);
  std::vector<double> heights(levels + 1);
  std::vector<double> vals(levels + 1);
  for (int j = 0; j <= levels; ++j) {
    heights[j] = opts.t0 * s_scale * std::ldexp(1.0, -j);
    vals[j] = U_of_t(heights[j]);
  }
  const double shrink = 1.0 - std::pow(2.0, -2.0 * sigma);
  std::vector<double> col(levels);
  for (int j = 0; j < levels; ++j) {
    col[j] = (vals[j] - vals[j + 1]) / (std::pow(heights[j], 2.0 * sigma) * shrink);
  }
  double scale = 0.0;
  for (double d : col) scale = std::max(scale, std::abs(d));

  // exponents of the correction terms in the quotient, ascending and distinct
  std::vector<double> expo;
  for (int k = 1; k <= 3; ++k) {
    for (double g : {2.0 * k - 2.0 * sigma, 2.0 * k}) {
      bool dup = false;
      for (double e : expo) dup = dup || std::abs(e - g) < 1e-9;
      if (!dup) expo.push_back(g);
    }
  }
  std::sort(expo.begin(), expo.end());

  double best = col.back();
  double best_diff = INFINITY;
  std::vector<double> trail;
  for (std::size_t m = 0; m <= expo.size() && col.size() >= 2; ++m) {
    for (std::size_t j = 1; j < col.size(); ++j) {
      const double diff = std::abs(col[j] - col[j - 1]);
      if (diff < best_diff) {
        best_diff = diff;
        best = col[j];
      }
    }
    trail.push_back(col.back());
    if (m == expo.size()) break;
    const double h = std::pow(2.0, -expo[m]);
    std::vector<double> next(col.size() - 1);
    for (std::size_t j = 0; j + 1 < col.size(); ++j) next[j] = (col[j + 1] - h * col[j]) / (1.0 - h);
    col = std::move(next);
  }
  if (best_diff > opts.tol * std::max(std::abs(best), scale)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "weighted normal derivative did not settle; extrapolants:";
    for (double v : trail) msg << ' ' << -2.0 * sigma * v;
    throw Error(ErrorCode::NonconvergentExtrapolation, msg.str());
  }
  return -2.0 * sigma * best;
}

namespace {

double grid_neumann(const AxiField& U, double s0, const Params& params) {
  const PolarGrid& g = *U.grid;
  const detail::FvGeometry geo = detail::fv_geometry(U.n, U.sigma, g);
  const std::size_t N = geo.N;
  if (N < 5) throw Error(ErrorCode::InvalidGeometry, "grid too coarse for a Neumann trace");
  auto u = [&](std::size_t i, std::size_t j) { return U.node(i, j); };
  // -(net flux) / S_i is the weighted outward flux through t = 0
  auto flux = [&](std::size_t i) { return -detail::fv_divergence(geo, u, i, 0) / geo.S[i]; };
  const double xi = std::log(s0);
  const double dxi = (g.xi.back() - g.xi.front()) / static_cast<double>(N);
  const double x = (xi - g.xi.front()) / dxi;
  if (!(x >= 1.0 - 1e-9 && x <= static_cast<double>(N) - 1.0 + 1e-9)) {
    throw Error(ErrorCode::ROutsideField, "s0 outside the interior of the solved annulus");
  }
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) return flux(static_cast<std::size_t>(nearest));
  // cubic interpolation over interior nodes 1..N-1
  const double xl = x - 1.0;
  const std::size_t i0 = detail::cubic_window(xl, N - 1) + 1;
  const auto w = detail::cubic_weights(x - static_cast<double>(i0));
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) sum += w[a] * flux(i0 + a);
  (void)params;
  return sum;
}

}  // namespace

double neumann_trace(const AxiField& U, double s0, const Params& params,
                     const NeumannOptions& opts) {
  if (!(s0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "s0 must be positive");
  if (!U.evaluator && U.grid) return grid_neumann(U, s0, params);
  if (!U.evaluator) throw Error(ErrorCode::MissingEvaluator, "field cannot be evaluated off-grid");
  const double sigma = U.sigma > 0.0 ? U.sigma : params.sigma();
  return neumann_limit([&](double t) { return U(s0, t); }, s0, sigma, opts);
}

AxiField singular_extension(const Params& params) {
  const int n = params.n();
  const double sigma = params.sigma();
  const double beta = params.beta();
  const double A = asymptotic_constant(params);
  const double a = beta / 2.0;
  const double b = (n - 2.0 * sigma - beta) / 2.0;
  const double c = n / 2.0;
  // 2F1(a, b; c; 1) = G1 since c - a - b = s > 0
  const double G1 = gamma_fn(c) * gamma_fn(sigma) / (gamma_fn(c - a) * gamma_fn(c - b));
  const double G2 = gamma_fn(c) * gamma_fn(-sigma) / (gamma_fn(a) * gamma_fn(b));
  const double C = A / G1;

  // Theta(theta) and sin^{1-2s} Theta'(theta)
  auto angular = [=](double th) -> std::pair<double, double> {
    const double cs = std::cos(th);
    const double sn = std::sin(th);
    const double z = cs * cs;
    if (z <= 0.5) {
      const Hyp2F1 h = hyp2f1_series(a, b, c, z);
      const double weighted = -2.0 * C * cs * std::pow(sn, 2.0 - 2.0 * sigma) * h.derivative;
      return {C * h.value, weighted};
    }
    const double w = sn * sn;
    const Hyp2F1 f1 = hyp2f1_series(a, b, 1.0 - sigma, w);
    const Hyp2F1 f2 = hyp2f1_series(c - a, c - b, 1.0 + sigma, w);
    const double ws = std::pow(w, sigma);
    const double value = G1 * f1.value + G2 * ws * f2.value;
    // sin^{2-2s} dF/dz
    const double scaled_dz =
        -(G1 * (w > 0.0 ? std::pow(w, 1.0 - sigma) : 0.0) * f1.derivative + G2 * sigma * f2.value +
          G2 * w * f2.derivative);
    return {C * value, -2.0 * C * cs * scaled_dz};
  };

  AxiField f;
  f.n = n;
  f.sigma = sigma;
  f.p = params.p();
  f.homogeneity = -beta;
  f.polar_evaluator = [=](double rho, double th) {
    const auto [theta_val, weighted] = angular(th);
    const double U = std::pow(rho, -beta) * theta_val;
    return FieldSample{U, -beta * U / rho, std::pow(rho, -beta - 2.0 * sigma) * weighted};
  };
  f.evaluator = [=](double s, double t) {
    const double rho = std::hypot(s, t);
    return std::pow(rho, -beta) * angular(std::atan2(t, s)).first;
  };
  return f;
}

// ---------------------------------------------------------------------------
// nonlinear annulus solver

namespace {

struct Layout {
  std::size_t N, M;
  std::size_t index(std::size_t i, std::size_t j) const { return (i - 1) * (M + 1) + j; }
  std::size_t unknowns() const { return (N - 1) * (M + 1); }
};

double pos_pow(double x, double p) { return x > 0.0 ? std::pow(x, p) : 0.0; }

// Full residual vector and its scaled max norm.
double residual(const detail::FvGeometry& geo, const Layout& lay, const std::vector<double>& U,
                double c_s, double p, double u_max, Eigen::VectorXd& R) {
  auto u = [&](std::size_t i, std::size_t j) { return U[i * (lay.M + 1) + j]; };
  double worst = 0.0;
  for (std::size_t i = 1; i < lay.N; ++i) {
    for (std::size_t j = 0; j <= lay.M; ++j) {
      double r = detail::fv_divergence(geo, u, i, j);
      if (j == 0) r += c_s * geo.S[i] * pos_pow(u(i, 0), p);
      R(static_cast<Eigen::Index>(lay.index(i, j))) = r;
      worst = std::max(worst, std::abs(r) / (detail::fv_scale(geo, i, j) * u_max));
    }
  }
  return worst;
}

Eigen::SparseMatrix<double> jacobian(const detail::FvGeometry& geo, const Layout& lay,
                                     const std::vector<double>& U, double c_s, double p,
                                     bool with_source) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(lay.unknowns() * 5);
  const std::size_t N = lay.N;
  const std::size_t M = lay.M;
  for (std::size_t i = 1; i < N; ++i) {
    for (std::size_t j = 0; j <= M; ++j) {
      const auto row = static_cast<int>(lay.index(i, j));
      double diag = 0.0;
      auto link = [&](std::size_t ii, std::size_t jj, double coef) {
        diag -= coef;
        if (ii >= 1 && ii < N) trip.emplace_back(row, static_cast<int>(lay.index(ii, jj)), coef);
      };
      link(i + 1, j, geo.T[i] * geo.W[j]);
      link(i - 1, j, geo.T[i - 1] * geo.W[j]);
      if (j < M) link(i, j + 1, geo.E[i] * geo.C[j] / geo.d_eta);
      if (j > 0) link(i, j - 1, geo.E[i] * geo.C[j - 1] / geo.d_eta);
      if (j == 0 && with_source) {
        const double uij = U[i * (M + 1)];
        diag += c_s * geo.S[i] * p * (uij > 0.0 ? std::pow(uij, p - 1.0) : 0.0);
      }
      trip.emplace_back(row, row, diag);
    }
  }
  Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(lay.unknowns()),
                                static_cast<Eigen::Index>(lay.unknowns()));
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

}  // namespace

AnnulusSolution solve_nonlinear_annulus(const Params& params, double inner_r, double outer_r,
                                        const DirichletData& dirichlet, const SolveOptions& opts) {
  if (!(inner_r > 0.0 && outer_r > inner_r)) {
    throw Error(ErrorCode::InvalidGeometry, "need 0 < inner_r < outer_r");
  }
  if (!dirichlet.inner || !dirichlet.outer) {
    throw Error(ErrorCode::InvalidArgument, "Dirichlet data missing on a half-circle");
  }
  const int n = params.n();
  const double sigma = params.sigma();
  const double p = params.p();
  const double c_s = neumann_factor(sigma);

  PolarGrid grid = make_polar_grid(inner_r, outer_r, opts.n_xi, opts.n_eta, sigma);
  const detail::FvGeometry geo = detail::fv_geometry(n, sigma, grid);
  const Layout lay{geo.N, geo.M};
  const std::size_t cols = lay.M + 1;

  std::vector<double> U((lay.N + 1) * cols, 0.0);
  double u_max = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    const double a = dirichlet.inner(grid.theta[j]);
    const double b = dirichlet.outer(grid.theta[j]);
    if (!(a >= 0.0) || !(b >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "Dirichlet data must be finite and nonnegative");
    }
    U[j] = a;
    U[lay.N * cols + j] = b;
    u_max = std::max({u_max, a, b});
  }

  AnnulusSolution out;
  out.field.n = n;
  out.field.sigma = sigma;
  out.field.p = p;
  if (u_max == 0.0) {
    out.field.values = U;
    attach_grid(out.field, std::move(grid));
    return out;
  }

  // initial iterate: linear problem with the boundary source frozen at a
  // power-law blend of the two Dirichlet traces
  {
    const double a = U[0];
    const double b = U[lay.N * cols];
    const double span = grid.xi.back() - grid.xi.front();
    Eigen::SparseMatrix<double> J = jacobian(geo, lay, U, c_s, p, false);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lay.unknowns()));
    for (std::size_t i = 1; i < lay.N; ++i) {
      const double frac = (grid.xi[i] - grid.xi.front()) / span;
      const double g = (a > 0.0 && b > 0.0) ? a * std::pow(b / a, frac) : a + frac * (b - a);
      rhs(static_cast<Eigen::Index>(lay.index(i, 0))) -= c_s * geo.S[i] * std::pow(g, p);
      // Dirichlet columns
      for (std::size_t j = 0; j < cols; ++j) {
        const auto row = static_cast<Eigen::Index>(lay.index(i, j));
        if (i == 1) rhs(row) -= geo.T[0] * geo.W[j] * U[j];
        if (i == lay.N - 1) rhs(row) -= geo.T[lay.N - 1] * geo.W[j] * U[lay.N * cols + j];
      }
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorCode::NewtonDivergence, "factorization of the linear problem failed");
    }
    const Eigen::VectorXd x = lu.solve(rhs);
    for (std::size_t i = 1; i < lay.N; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        double v = x(static_cast<Eigen::Index>(lay.index(i, j)));
        if (v < 0.0) {
          v = 0.0;
          ++out.report.projected_nodes;
        }
        U[i * cols + j] = v;
      }
    }
  }

  Eigen::VectorXd R(static_cast<Eigen::Index>(lay.unknowns()));
  double res = residual(geo, lay, U, c_s, p, u_max, R);
  out.report.residual_history.push_back(res);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool analysed = false;
  int it = 0;
  while (res > opts.tol) {
    if (it >= opts.max_newton) {
      std::ostringstream msg;
      msg << "Newton stalled after " << it << " steps, scaled residual " << res
          << "; halvings per step:";
      for (int h : out.report.halvings) msg << ' ' << h;
      throw Error(ErrorCode::NewtonDivergence, msg.str());
    }
    Eigen::SparseMatrix<double> J = jacobian(geo, lay, U, c_s, p, true);
    if (!analysed) {
      lu.analyzePattern(J);
      analysed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorCode::NewtonDivergence, "Jacobian factorization failed");
    }
    const Eigen::VectorXd delta = lu.solve(-R);
    double step = 1.0;
    int halvings = 0;
    const double norm0 = R.norm();
    std::vector<double> trial(U);
    Eigen::VectorXd Rt(R.size());
    double trial_res = 0.0;
    int projected = 0;
    for (;;) {
      projected = 0;
      for (std::size_t i = 1; i < lay.N; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
          double v = U[i * cols + j] + step * delta(static_cast<Eigen::Index>(lay.index(i, j)));
          if (v < 0.0) {
            v = 0.0;
            ++projected;
          }
          trial[i * cols + j] = v;
        }
      }
      trial_res = residual(geo, lay, trial, c_s, p, u_max, Rt);
      if (Rt.norm() < norm0 || trial_res <= opts.tol) break;
      if (++halvings > 30) {
        std::ostringstream msg;
        msg << "damping failed to reduce the residual at Newton step " << it + 1
            << " (the data may lie beyond a fold with no nonnegative solution)"
            << "; residual history:";
        for (double r : out.report.residual_history) msg << ' ' << r;
        throw Error(ErrorCode::NewtonDivergence, msg.str());
      }
      step *= 0.5;
    }
    U.swap(trial);
    R = Rt;
    res = trial_res;
    out.report.projected_nodes += projected;
    out.report.halvings.push_back(halvings);
    out.report.residual_history.push_back(res);
    ++it;
  }
  out.report.newton_iterations = it;
  out.report.final_residual = res;
  out.field.values = std::move(U);
  attach_grid(out.field, std::move(grid));
  return out;
}

DiscreteResiduals discrete_residuals(const AxiField& U, const Params& params) {
  if (!U.grid) throw Error(ErrorCode::InvalidArgument, "discrete residuals need a grid field");
  const detail::FvGeometry geo = detail::fv_geometry(U.n, U.sigma, *U.grid);
  const double c_s = neumann_factor(U.sigma);
  const double p = params.p();
  double u_max = 0.0;
  for (double v : U.values) u_max = std::max(u_max, std::abs(v));
  if (u_max == 0.0) return {0.0, 0.0};
  auto u = [&](std::size_t i, std::size_t j) { return U.node(i, j); };
  DiscreteResiduals out{0.0, 0.0};
  for (std::size_t i = 1; i < geo.N; ++i) {
    for (std::size_t j = 0; j <= geo.M; ++j) {
      double r = detail::fv_divergence(geo, u, i, j);
      if (j == 0) r += c_s * geo.S[i] * pos_pow(u(i, 0), p);
      const double scaled = std::abs(r) / (detail::fv_scale(geo, i, j) * u_max);
      double& slot = j == 0 ? out.boundary : out.interior;
      slot = std::max(slot, scaled);
    }
  }
  return out;
}

}  // namespace fracsing
