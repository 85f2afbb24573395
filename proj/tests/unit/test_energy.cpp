#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "fracsing/energy.hpp"
#include "fracsing/extension.hpp"
#include "fracsing/specfun.hpp"
#include "test_support.hpp"

using namespace fracsing;
using fracsing::testing::rel_err;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: nothing thrown
}

AxiField polar_field(int n, double sigma, std::function<FieldSample(double, double)> f) {
  AxiField U;
  U.n = n;
  U.sigma = sigma;
  U.polar_evaluator = std::move(f);
  return U;
}

// 1 + t: dU/drho = sin, W = rho^{-2s} sin^{1-2s} * rho cos
AxiField one_plus_t(int n, double sigma) {
  return polar_field(n, sigma, [sigma](double rho, double th) {
    const double s = std::sin(th);
    return FieldSample{1.0 + rho * s, s,
                       std::pow(rho, 1.0 - 2.0 * sigma) * std::pow(s, 1.0 - 2.0 * sigma) * std::cos(th)};
  });
}

// int_0^{pi/2} cos^{n-1} sin^k
double half_beta(int n, double k) { return 0.5 * beta_fn(n / 2.0, (k + 1.0) / 2.0); }

const AxiField& solved_perturbed() {
  // 5% below the exact data on [0.2, 2.5]; 5% above has no solution on
  // an annulus this wide (the branch folds near 1.035)
  static const AxiField field = [] {
    const auto params = validate_params(3, 0.5, 1.8);
    const AxiField E = singular_extension(params);
    DirichletData d{[E](double th) { return 0.95 * E.polar_evaluator(0.2, th).U; },
                    [E](double th) { return 0.95 * E.polar_evaluator(2.5, th).U; }};
    return solve_nonlinear_annulus(params, 0.2, 2.5, d).field;
  }();
  return field;
}

}  // namespace

TEST_CASE("zero field has zero energy") {
  const auto params = validate_params(3, 0.4, 1.5);
  const AxiField Z = polar_field(3, 0.4, [](double, double) { return FieldSample{0.0, 0.0, 0.0}; });
  const QuadRule rule = energy_rule(params);
  CHECK(energy_at(Z, 0.7, params, rule) == 0.0);
  CHECK(energy_derivative(Z, 0.7, params, rule) == 0.0);
}

TEST_CASE("energy of the exact singular extension is constant") {
  for (auto t : {std::tuple{3, 0.5, 1.8}, {2, 0.75, 5.0}, {4, 0.3, 1.35}, {3, 0.85, 2.5}}) {
    const auto params = validate_params(std::get<0>(t), std::get<1>(t), std::get<2>(t));
    const AxiField E = singular_extension(params);
    const QuadRule rule = energy_rule(params);
    double lo = INFINITY, hi = -INFINITY;
    for (double r : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double e = energy_at(E, r, params, rule);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      CHECK(std::abs(energy_derivative(E, r, params, rule)) <= 1e-10 * std::abs(e));
    }
    INFO("sigma=" << params.sigma());
    CHECK((hi - lo) <= 1e-6 * std::abs(hi));
  }
}

// Independent route to the angular profile: shoot the ODE
//   (cos^{n-1} sin^{1-2s} Theta')' = beta (n - 2s - beta) cos^{n-1} sin^{1-2s} Theta
// from Theta(0) = A with flux -c_s A^p, RK4 on 1e6 steps, then trapezoid
// sums of all five integrals at r = 1. At s = 1/2 every term is smooth.
TEST_CASE("energy against a dense shooting and trapezoid oracle") {
  const auto params = validate_params(3, 0.5, 1.8);
  const int n = 3;
  const double s = 0.5;
  const double p = 1.8;
  const double beta = params.beta();
  const double A = asymptotic_constant(params);
  const double k2 = beta * (n - 2.0 * s - beta);
  const double cs = neumann_factor(s);

  const long steps = 1000000;
  const double delta = 1e-3;  // stop short of the axis, where cos^{n-1} -> 0
  const double end = 0.5 * std::numbers::pi - delta;
  const double h = end / steps;
  auto wgt = [&](double th) { return std::pow(std::cos(th), n - 1.0) * std::pow(std::sin(th), 1.0 - 2.0 * s); };
  auto rhs = [&](double th, double y1, double y2, double& d1, double& d2) {
    d1 = y2 / wgt(th);
    d2 = k2 * wgt(th) * y1;
  };
  double y1 = A;
  double y2 = -cs * std::pow(A, p);  // weighted flux at the plane
  double i_rad = 0.0, i_cross = 0.0, i_sq = 0.0, i_tan = 0.0;
  auto accumulate = [&](double th, double c) {
    const double w = wgt(th);
    const double th_prime = y2 / w;
    i_rad += c * w * beta * beta * y1 * y1;
    i_cross += c * w * (-beta) * y1 * y1;
    i_sq += c * w * y1 * y1;
    i_tan += c * w * th_prime * th_prime;
  };
  accumulate(0.0, 0.5 * h);
  for (long k = 0; k < steps; ++k) {
    const double th = k * h;
    double a1, a2, b1, b2, c1, c2, e1, e2;
    rhs(th, y1, y2, a1, a2);
    rhs(th + 0.5 * h, y1 + 0.5 * h * a1, y2 + 0.5 * h * a2, b1, b2);
    rhs(th + 0.5 * h, y1 + 0.5 * h * b1, y2 + 0.5 * h * b2, c1, c2);
    rhs(th + h, y1 + h * c1, y2 + h * c2, e1, e2);
    y1 += h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + e1);
    y2 += h / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + e2);
    accumulate(th + h, k + 1 == steps ? 0.5 * h : h);
  }
  // regularity on the axis confirms A and the flux normalization
  CHECK(std::abs(y2) <= 1e-6 * cs * std::pow(A, p));
  // remaining sliver next to the axis, Theta frozen there
  const double sliver = std::pow(delta, n) / n;
  i_rad += sliver * beta * beta * y1 * y1;
  i_cross -= sliver * beta * y1 * y1;
  i_sq += sliver * y1 * y1;

  const double S = sphere_area(n);
  const double J1 = 2.0 * beta - (n - 2.0 * s);
  const double oracle = S * (i_rad + beta * i_cross) + 0.5 * beta * J1 * S * i_sq -
                        (0.5 * S * (i_rad + i_tan) - cs / (p + 1.0) * S * std::pow(A, p + 1.0));

  const AxiField E = singular_extension(params);
  const double got = energy_at(E, 1.0, params, energy_rule(params, 128));
  CHECK(rel_err(got, oracle) <= 1e-7);
}

TEST_CASE("derivative formula on non-solutions, in closed form") {
  for (auto t : {std::tuple{3, 0.5, 1.8}, {2, 0.3, 1.6}, {5, 0.7, 1.6}}) {
    const auto params = validate_params(std::get<0>(t), std::get<1>(t), std::get<2>(t));
    const int n = params.n();
    const double s = params.sigma();
    const double beta = params.beta();
    const double J1 = 2.0 * beta - (n - 2.0 * s);
    const double a = 2.0 * beta + 2.0 * s - n;
    const double S = sphere_area(n);
    const QuadRule rule = energy_rule(params);
    INFO("n=" << n << " s=" << s);
    for (double r : {0.5, 1.0, 3.0}) {
      const AxiField one = polar_field(n, s, [](double, double) { return FieldSample{1.0, 0.0, 0.0}; });
      const double want_one = J1 * beta * beta * S * half_beta(n, 1.0 - 2.0 * s) *
                              std::pow(r, a - 2.0 + n + 1.0 - 2.0 * s);
      CHECK(rel_err(energy_derivative(one, r, params, rule), want_one) <= 1e-10);

      // 1 + t: (dU/drho + beta U / r) = (1 + beta) sin + beta / r
      const double b = beta / r;
      const double integral = (1.0 + beta) * (1.0 + beta) * half_beta(n, 3.0 - 2.0 * s) +
                              2.0 * (1.0 + beta) * b * half_beta(n, 2.0 - 2.0 * s) +
                              b * b * half_beta(n, 1.0 - 2.0 * s);
      const double want = J1 * std::pow(r, a) * S * std::pow(r, n + 1.0 - 2.0 * s) * integral;
      CHECK(rel_err(energy_derivative(one_plus_t(n, s), r, params, rule), want) <= 1e-10);
    }
    // the curve is still produced for non-solutions
    const auto c = energy_curve(one_plus_t(n, s), {0.5, 2.0}, 4, params);
    CHECK(c.E_values.size() == 4);
  }
}

TEST_CASE("energy on a solved field: sign, FD consistency, monotonicity") {
  const auto params = validate_params(3, 0.5, 1.8);
  const AxiField& U = solved_perturbed();
  const auto c = energy_curve(U, {0.25, 2.0}, 12, params);
  double top = 0.0;
  for (double e : c.E_values) top = std::max(top, std::abs(e));
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    INFO("r=" << c.radii[i]);
    CHECK(c.dE_formula[i] >= -1e-9 * top);
    CHECK(std::abs(c.dE_formula[i] - c.dE_fd[i]) <= 1e-4 * std::max(1.0, std::abs(c.dE_formula[i])));
    CHECK(c.monotone_ok[i]);
  }
  // the perturbation is visible: E is not constant
  CHECK(c.E_values.back() - c.E_values.front() > 1e-4 * top);
}

TEST_CASE("scaling identity") {
  const auto params = validate_params(3, 0.5, 1.8);
  const QuadRule rule = energy_rule(params);
  const AxiField E = singular_extension(params);
  CHECK(scaling_residual(E, 1.0, 1.0, params, rule) == 0.0);
  for (double lam : {0.25, 0.5, 2.0, 3.7}) {
    CHECK(std::abs(scaling_residual(E, lam, 1.0, params, rule)) <= 1e-10 * std::abs(energy_at(E, 1.0, params, rule)));
  }
  const AxiField& U = solved_perturbed();
  for (double lam : {0.25, 0.5, 2.0}) {
    const double e = energy_at(U, lam, params, rule);
    CHECK(std::abs(scaling_residual(U, lam, 1.0, params, rule)) <= 1e-6 * std::abs(e));
  }
}

TEST_CASE("E(0+)") {
  const auto params = validate_params(3, 0.5, 1.8);
  const QuadRule rule = energy_rule(params);
  const AxiField E = singular_extension(params);
  const auto lim = energy_limit(E, params);
  CHECK(rel_err(lim.value, energy_at(E, 1.0, params, rule)) <= 1e-12);

  // bounded smooth field: every term carries r^{2 beta} or r^{2 beta + 2s}
  const AxiField smooth = polar_field(3, 0.5, [](double rho, double th) {
    const double s = rho * std::cos(th), t = rho * std::sin(th);
    const double U = 1.0 + 0.1 * s * s - 0.05 * t;
    const double dr = 0.2 * s * std::cos(th) - 0.05 * std::sin(th);
    const double dth = -0.2 * s * rho * std::sin(th) - 0.05 * rho * std::cos(th);
    return FieldSample{U, dr, dth / rho};  // s = 1/2: W = d_theta U / rho
  });
  const auto z = energy_limit(smooth, params);
  CHECK(std::abs(z.value) <= 1e-8 * std::abs(z.energies.front()));

  // solved field with exact data on the inner circle and 5% less on the
  // outer one; toward 0 it approaches the singular solution in steps, so
  // the extrapolants only agree to about 1e-3
  const AxiField Ex = singular_extension(params);
  DirichletData d{[Ex](double th) { return Ex.polar_evaluator(1e-4, th).U; },
                  [Ex](double th) { return 0.95 * Ex.polar_evaluator(2.5, th).U; }};
  SolveOptions o;
  o.n_xi = 512;
  o.n_eta = 64;
  const AxiField wide = solve_nonlinear_annulus(params, 1e-4, 2.5, d, o).field;
  EnergyLimitOptions loose;
  loose.tol = 1e-3;
  const auto l = energy_limit(wide, params, loose);
  CHECK(std::isfinite(l.value));
  CHECK(l.value <= l.energies.front());
  for (std::size_t k = 1; k < l.energies.size(); ++k) CHECK(l.energies[k] <= l.energies[k - 1]);
}

TEST_CASE("energy curve CSV") {
  const auto params = validate_params(3, 0.5, 1.8);
  const auto c = energy_curve(singular_extension(params), {0.5, 2.0}, 5, params);
  for (bool ok : c.monotone_ok) CHECK(ok);
  const auto path = std::filesystem::temp_directory_path() / "fracsing_energy_curve.csv";
  write_energy_curve(c, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "r,E,dE_formula,dE_fd,monotone_ok");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "true");
  }
  CHECK(rows == 5);
}

TEST_CASE("structured energy failures") {
  const auto params = validate_params(3, 0.5, 1.8);
  const AxiField& U = solved_perturbed();
  const QuadRule rule = energy_rule(params);
  CHECK(code_of([&] { energy_at(U, 3.0, params, rule); }) == ErrorCode::ROutsideField);
  CHECK(code_of([&] { energy_at(U, 0.2001, params, rule); }) == ErrorCode::DerivativeStencilFailure);
  CHECK(code_of([&] { energy_at(U, 1.0, params, energy_rule(validate_params(3, 0.3, 1.4))); }) ==
        ErrorCode::InvalidArgument);
  AxiField bare;
  bare.n = 3;
  bare.sigma = 0.5;
  bare.evaluator = [](double, double) { return 1.0; };
  CHECK(code_of([&] { energy_at(bare, 1.0, params, rule); }) == ErrorCode::DerivativeStencilFailure);
}
