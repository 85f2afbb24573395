#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracsing/extension.hpp"
#include "fracsing/fracops.hpp"
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

RadialTrace constant_trace(double c) {
  return make_trace([c](double) { return c; }, log_grid(1e-2, 1e2, 9), TailSpec{0.0, 0.0});
}

DirichletData exact_data(const AxiField& E, double inner, double outer, double scale = 1.0) {
  return {[=](double th) { return scale * E.polar_evaluator(inner, th).U; },
          [=](double th) { return scale * E.polar_evaluator(outer, th).U; }};
}

double max_error_vs(const AxiField& solved, const AxiField& exact) {
  const PolarGrid& g = *solved.grid;
  double err = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      const double want = exact.polar_evaluator(std::exp(g.xi[i]), g.theta[j]).U;
      err = std::max(err, std::abs(solved.node(i, j) - want));
      top = std::max(top, want);
    }
  }
  return err / top;
}

}  // namespace

TEST_CASE("kernel normalization matches the Gamma closed form") {
  for (auto [n, s] : {std::pair{2, 0.3}, {3, 0.5}, {4, 0.75}, {6, 0.95}, {2, 0.05}}) {
    const KernelSpec k = make_kernel_spec(n, s);
    INFO("n=" << n << " s=" << s);
    CHECK(rel_err(poisson_kernel(k, 0.0, 1.0), poisson_constant(n, s)) <= 1e-8);
  }
}

TEST_CASE("kernel is positive and homogeneous of degree -n") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.01, 5.0);
  const KernelSpec k = make_kernel_spec(3, 0.4);
  for (int i = 0; i < 50; ++i) {
    const double d = pos(rng);
    const double t = pos(rng);
    const double lam = pos(rng);
    CHECK(poisson_kernel(k, d, t) > 0.0);
    CHECK(rel_err(poisson_kernel(k, lam * d, lam * t), std::pow(lam, -3.0) * poisson_kernel(k, d, t)) <=
          1e-13);
  }
  CHECK(code_of([&] { poisson_kernel(k, 1.0, 0.0); }) == ErrorCode::TNonpositive);
}

TEST_CASE("extension preserves constants at random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.05, 4.0);
  for (auto [n, s] : {std::pair{3, 0.5}, {2, 0.8}, {5, 0.2}}) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 5; ++i) pts.emplace_back(pos(rng), pos(rng));
    const AxiField U = extend_trace(constant_trace(2.5), make_kernel_spec(n, s), pts);
    for (double v : U.values) CHECK(std::abs(v - 2.5) <= 1e-10 * 2.5);
  }
}

TEST_CASE("extension of a homogeneous trace is homogeneous") {
  const auto params = validate_params(3, 0.3, 1.4);
  const RadialTrace u = singular_solution_trace(params);
  const KernelSpec k = make_kernel_spec(3, 0.3);
  const double lam = 3.0;
  std::vector<std::pair<double, double>> pts{{0.4, 0.2}, {1.0, 1.0}, {0.1, 0.9}};
  const std::size_t base = pts.size();
  for (std::size_t i = 0; i < base; ++i) pts.emplace_back(lam * pts[i].first, lam * pts[i].second);
  const AxiField U = extend_trace(u, k, pts);
  for (std::size_t i = 0; i < base; ++i) {
    CHECK(rel_err(U.values[base + i], std::pow(lam, -params.beta()) * U.values[i]) <= 1e-10);
  }
}

// On the axis s = 0 the angular integral is trivial, so the extension is a
// single radial integral. Brute force: composite Simpson in log rho with 1e6
// panels, kernel constant from the Gamma closed form.
TEST_CASE("U(0, 1) against a dense radial quadrature") {
  const auto params = validate_params(3, 0.5, 1.8);
  const int n = 3;
  const double s = 0.5;
  const double A = asymptotic_constant(params);
  const double beta = params.beta();
  const double q = (n + 2.0 * s) / 2.0;
  const long panels = 1000000;
  const double lo = -40.0;
  const double hi = 40.0;
  const double h = (hi - lo) / panels;
  auto f = [&](double x) {
    const double r = std::exp(x);
    return std::pow(r, n) * A * std::pow(r, -beta) * std::pow(r * r + 1.0, -q);
  };
  double sum = f(lo) + f(hi);
  for (long i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  const double oracle = poisson_constant(n, s) * sphere_area(n) * sum * h / 3.0;

  const AxiField U = extend_trace(singular_solution_trace(params), make_kernel_spec(n, s), {{0.0, 1.0}});
  CHECK(rel_err(U.values[0], oracle) <= 1e-7);
}

TEST_CASE("weighted Neumann limit on closed forms") {
  const auto params = validate_params(3, 0.35, 1.5);
  AxiField c;
  c.n = 3;
  c.sigma = 0.35;
  c.evaluator = [](double, double) { return 4.0; };
  CHECK(std::abs(neumann_trace(c, 1.0, params)) <= 1e-12);

  for (double s : {0.2, 0.5, 0.85}) {
    AxiField w;
    w.n = 3;
    w.sigma = s;
    w.evaluator = [s](double, double t) { return std::pow(t, 2.0 * s); };
    CHECK(rel_err(neumann_trace(w, 0.7, params), -2.0 * s) <= 1e-10);
  }

  // U = 1 - t^{2s} + t^2: the smooth t^2 part must be extrapolated away
  const double s = 0.3;
  auto f = [s](double t) { return 1.0 - std::pow(t, 2.0 * s) + t * t + 0.5 * std::pow(t, 2.0 + 2.0 * s); };
  CHECK(rel_err(neumann_limit(f, 1.0, s), 2.0 * s) <= 1e-8);

  // noise that never settles
  auto rough = [](double t) { return std::sin(1.0 / t); };
  CHECK(code_of([&] { neumann_limit(rough, 1.0, 0.5); }) == ErrorCode::NonconvergentExtrapolation);
}

TEST_CASE("Neumann trace of the extended singular solution") {
  for (auto t : {std::tuple{3, 0.5, 1.8}, {3, 0.3, 1.4}, {2, 0.7, 4.0}}) {
    const auto params = validate_params(std::get<0>(t), std::get<1>(t), std::get<2>(t));
    const double A = asymptotic_constant(params);
    const AxiField U =
        extend_trace(singular_solution_trace(params), make_kernel_spec(params.n(), params.sigma()), {});
    const double want = neumann_factor(params.sigma()) * std::pow(A, params.p());
    INFO("sigma=" << params.sigma());
    CHECK(rel_err(neumann_trace(U, 1.0, params), want) <= 1e-4);
  }
  // at s = 1/2 the factor is one and the limit is A^p itself
  const auto half = validate_params(3, 0.5, 1.8);
  CHECK(neumann_factor(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  const AxiField U = extend_trace(singular_solution_trace(half), make_kernel_spec(3, 0.5), {});
  CHECK(rel_err(neumann_trace(U, 1.0, half), std::pow(asymptotic_constant(half), 1.8)) <= 1e-4);
}

TEST_CASE("closed-form singular extension agrees with the Poisson integral") {
  fracsing::testing::AdmissibleSampler draw(99);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.05, 3.0);
  for (int i = 0; i < 4; ++i) {
    const auto tr = draw();
    const auto params = validate_params(tr.n, tr.sigma, tr.p);
    const AxiField E = singular_extension(params);
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 3; ++k) pts.emplace_back(pos(rng), pos(rng));
    const AxiField U = extend_trace(singular_solution_trace(params),
                                    make_kernel_spec(tr.n, tr.sigma), pts);
    INFO("n=" << tr.n << " s=" << tr.sigma << " p=" << tr.p);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      CHECK(rel_err(U.values[k], E(pts[k].first, pts[k].second)) <= 1e-8);
    }
  }
}

TEST_CASE("singular extension: trace, flux and homogeneity on random triples") {
  fracsing::testing::AdmissibleSampler draw(2025);
  for (int i = 0; i < 25; ++i) {
    const auto tr = draw();
    const auto params = validate_params(tr.n, tr.sigma, tr.p);
    const double A = asymptotic_constant(params);
    const AxiField E = singular_extension(params);
    INFO("n=" << tr.n << " s=" << tr.sigma << " p=" << tr.p);
    CHECK(rel_err(E(1.0, 0.0), A) <= 1e-12);
    const FieldSample at_plane = E.polar_evaluator(1.0, 0.0);
    CHECK(rel_err(-at_plane.W, neumann_factor(tr.sigma) * std::pow(A, tr.p)) <= 1e-9);
    CHECK(rel_err(E(2.0 * 0.3, 2.0 * 0.7), std::pow(2.0, -params.beta()) * E(0.3, 0.7)) <= 1e-12);
    // across the switch between the two hypergeometric representations
    const double below = E.polar_evaluator(1.0, std::numbers::pi / 4.0 - 1e-14).U;
    const double above = E.polar_evaluator(1.0, std::numbers::pi / 4.0 + 1e-14).U;
    CHECK(std::abs(below - above) <= 1e-11 * A);
    CHECK(E(0.0, 1.0) > 0.0);
  }
}

TEST_CASE("structured extension failures") {
  const KernelSpec k = make_kernel_spec(3, 0.5);
  auto no_tails = make_trace([](double) { return 1.0; }, {1.0, 2.0}, std::nullopt);
  CHECK(code_of([&] { extend_trace(no_tails, k, {{1.0, 1.0}}); }) == ErrorCode::UndeclaredTailBehavior);
  CHECK(code_of([&] { extend_trace(constant_trace(1.0), k, {{1.0, 0.0}}); }) == ErrorCode::TNonpositive);
  RadialTrace samples;
  samples.radii = {1.0, 2.0};
  samples.values = {1.0, 1.0};
  samples.tails = TailSpec{0.0, 0.0};
  CHECK(code_of([&] { extend_trace(samples, k, {{1.0, 1.0}}); }) == ErrorCode::MissingEvaluator);
}

TEST_CASE("annulus solver: zero data gives zero") {
  const auto params = validate_params(3, 0.5, 1.8);
  DirichletData zero{[](double) { return 0.0; }, [](double) { return 0.0; }};
  SolveOptions o;
  o.n_xi = 32;
  o.n_eta = 16;
  const auto sol = solve_nonlinear_annulus(params, 1.0, 2.0, zero, o);
  for (double v : sol.field.values) CHECK(v == 0.0);
}

TEST_CASE("annulus solver: manufactured solution converges at second order") {
  for (auto t : {std::tuple{3, 0.5, 1.8}, {2, 0.3, 1.6}}) {
    const auto params = validate_params(std::get<0>(t), std::get<1>(t), std::get<2>(t));
    const AxiField E = singular_extension(params);
    double prev = 0.0;
    for (int N : {16, 32, 64, 128}) {
      SolveOptions o;
      o.n_xi = N;
      o.n_eta = N / 2;
      const auto sol = solve_nonlinear_annulus(params, 1.0, 2.0, exact_data(E, 1.0, 2.0), o);
      CHECK(sol.report.final_residual <= o.tol);
      const double err = max_error_vs(sol.field, E);
      INFO("sigma=" << params.sigma() << " N=" << N << " err=" << err);
      if (prev > 0.0) CHECK(prev / err >= 1.8);
      prev = err;
    }
  }
}

TEST_CASE("annulus solver: discrete residuals and Neumann consistency") {
  const auto params = validate_params(3, 0.5, 1.8);
  const AxiField E = singular_extension(params);
  SolveOptions o;
  o.n_xi = 64;
  o.n_eta = 32;
  const auto sol = solve_nonlinear_annulus(params, 1.0, 3.0, exact_data(E, 1.0, 3.0, 1.05), o);
  const auto res = discrete_residuals(sol.field, params);
  CHECK(res.interior <= o.tol);
  CHECK(res.boundary <= o.tol);
  double lowest = INFINITY;
  for (double v : sol.field.values) lowest = std::min(lowest, v);
  CHECK(lowest >= 0.0);

  // boundary flux read back from the grid equals the imposed c_s U^p
  const PolarGrid& g = *sol.field.grid;
  const double cs = neumann_factor(0.5);
  for (std::size_t i : {5u, 20u, 40u, 58u}) {
    const double s0 = std::exp(g.xi[i]);
    const double imposed = cs * std::pow(sol.field.node(i, 0), 1.8);
    CHECK(rel_err(neumann_trace(sol.field, s0, params), imposed) <= 1e-7);
  }
}

TEST_CASE("annulus solver: comparison of ordered data") {
  const auto params = validate_params(3, 0.4, 1.5);
  const AxiField E = singular_extension(params);
  SolveOptions o;
  o.n_xi = 48;
  o.n_eta = 24;
  const auto hi = solve_nonlinear_annulus(params, 0.5, 2.0, exact_data(E, 0.5, 2.0, 1.1), o);
  const auto lo = solve_nonlinear_annulus(params, 0.5, 2.0, exact_data(E, 0.5, 2.0, 0.9), o);
  double top = 0.0;
  for (double v : hi.field.values) top = std::max(top, v);
  for (std::size_t k = 0; k < hi.field.values.size(); ++k) {
    CHECK(hi.field.values[k] >= lo.field.values[k] - 1e-9 * top);
  }
}

TEST_CASE("annulus solver: structured failures") {
  const auto params = validate_params(3, 0.5, 1.8);
  DirichletData one{[](double) { return 1.0; }, [](double) { return 1.0; }};
  CHECK(code_of([&] { solve_nonlinear_annulus(params, 2.0, 1.0, one); }) == ErrorCode::InvalidGeometry);
  DirichletData negative{[](double) { return -1.0; }, [](double) { return 1.0; }};
  CHECK(code_of([&] { solve_nonlinear_annulus(params, 1.0, 2.0, negative); }) ==
        ErrorCode::InvalidArgument);
  // data far above any solution of the focusing boundary problem
  DirichletData huge{[](double) { return 1e3; }, [](double) { return 1e3; }};
  SolveOptions o;
  o.n_xi = 32;
  o.n_eta = 16;
  CHECK(code_of([&] { solve_nonlinear_annulus(params, 1.0, 3.0, huge, o); }) ==
        ErrorCode::NewtonDivergence);
}

TEST_CASE("solved field CSV and sidecar round trip") {
  const auto params = validate_params(3, 0.5, 1.8);
  const AxiField E = singular_extension(params);
  SolveOptions o;
  o.n_xi = 16;
  o.n_eta = 8;
  const auto sol = solve_nonlinear_annulus(params, 1.0, 2.0, exact_data(E, 1.0, 2.0), o);
  const auto dir = std::filesystem::temp_directory_path() / "fracsing_field_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "U.csv").string();
  write_field(sol.field, path);
  const AxiField back = read_field(path);
  REQUIRE(back.values.size() == sol.field.values.size());
  for (std::size_t k = 0; k < back.values.size(); ++k) CHECK(back.values[k] == sol.field.values[k]);
  REQUIRE(back.grid.has_value());
  CHECK(back.grid->xi == sol.field.grid->xi);
  CHECK(back.grid->eta == sol.field.grid->eta);
  CHECK(*back.p == 1.8);
  // off-node evaluation by interpolation reproduces the exact field closely
  CHECK(rel_err(back(1.3, 0.4), E(1.3, 0.4)) <= 1e-3);
}
