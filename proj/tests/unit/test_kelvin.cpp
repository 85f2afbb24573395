#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fracsing/extension.hpp"
#include "fracsing/fracops.hpp"
#include "fracsing/kelvin.hpp"
#include "fracsing/specfun.hpp"
#include "json.hpp"
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

double norm(const Point& y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::sqrt(s);
}

std::vector<double> uniform_lambdas(double R, int count) {
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(R * k / count);
  return out;
}

const Params& base() {
  static const Params p = validate_params(3, 0.5, 1.8);
  return p;
}

}  // namespace

TEST_CASE("double Kelvin transform is the identity") {
  const Params& P = base();
  const RadialTrace u = singular_solution_trace(P);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);

  SUBCASE("radial, center 0") {
    for (double lam : {0.3, 1.0, 2.5}) {
      const RadialTrace k2 = kelvin_transform(kelvin_transform(u, 3, 0.5, lam), 3, 0.5, lam);
      for (double r : {1e-3, 0.2, 1.0, 7.0, 300.0}) CHECK(rel_err(k2(r), u(r)) <= 1e-12);
      // samples map exactly onto samples
      for (std::size_t i = 0; i < u.radii.size(); ++i) {
        CHECK(rel_err(k2.radii[i], u.radii[i]) <= 1e-14);
        CHECK(rel_err(k2.values[i], u.values[i]) <= 1e-12);
      }
    }
  }
  SUBCASE("off-center point functions") {
    const Point c{0.3, -0.7, 0.2};
    for (double lam : {0.4, 1.7}) {
      const PointFunction k1 = kelvin_transform(u, c, 3, 0.5, lam);
      const PointFunction k2 = kelvin_transform(k1, c, lam);
      for (int i = 0; i < 20; ++i) {
        const Point y{coord(rng), coord(rng), coord(rng)};
        CHECK(rel_err(k2(y), u(norm(y))) <= 1e-12);
      }
    }
  }
  SUBCASE("extension fields") {
    const AxiField E = singular_extension(P);
    const AxiField k2 = kelvin_transform(kelvin_transform(E, 0.8), 0.8);
    for (auto [s, t] : {std::pair{0.5, 0.1}, {1.0, 1.0}, {3.0, 0.01}}) CHECK(rel_err(k2(s, t), E(s, t)) <= 1e-12);
    const FieldSample a = k2.polar_evaluator(1.3, 0.4);
    const FieldSample b = E.polar_evaluator(1.3, 0.4);
    CHECK(rel_err(a.dU_drho, b.dU_drho) <= 1e-12);
    CHECK(rel_err(a.W, b.W) <= 1e-12);

    const Point c{0.5, 0.0, -0.25};
    const ExtFunction e2 = kelvin_transform(kelvin_transform(E, c, 1.1), c, 1.1);
    for (int i = 0; i < 10; ++i) {
      const Point y{coord(rng), coord(rng), coord(rng)};
      const double t = 0.5 * (coord(rng) + 2.0);
      CHECK(rel_err(e2(y, t), E(norm(y), t)) <= 1e-12);
    }
  }
  SUBCASE("grid fields map onto the inverted grid") {
    const AxiField E = singular_extension(P);
    DirichletData d{[E](double th) { return E.polar_evaluator(1.0, th).U; },
                    [E](double th) { return E.polar_evaluator(2.0, th).U; }};
    SolveOptions o;
    o.n_xi = 16;
    o.n_eta = 8;
    const AxiField U = solve_nonlinear_annulus(P, 1.0, 2.0, d, o).field;
    const AxiField K = kelvin_transform(U, 1.2);
    CHECK(K.grid->xi.front() == doctest::Approx(std::log(1.44 / 2.0)).epsilon(1e-14));
    const AxiField K2 = kelvin_transform(K, 1.2);
    for (std::size_t k = 0; k < U.values.size(); ++k) CHECK(rel_err(K2.values[k], U.values[k]) <= 1e-12);
  }
}

TEST_CASE("Kelvin transform fixes the sphere") {
  const Params& P = base();
  const RadialTrace u = singular_solution_trace(P);
  const Point c{1.0, 0.5, 0.0};
  const double lam = 0.9;
  const PointFunction k = kelvin_transform(u, c, 3, 0.5, lam);
  for (double phi : {0.0, 1.0, 2.0, 3.0}) {
    const Point y{c[0] + lam * std::cos(phi), c[1] + lam * std::sin(phi) * 0.6, c[2] + lam * std::sin(phi) * 0.8};
    CHECK(rel_err(k(y), u(norm(y))) <= 1e-12);
  }
}

TEST_CASE("Kelvin transform of the power law at the origin") {
  const Params& P = base();
  const double A = asymptotic_constant(P);
  const double beta = P.beta();
  const double g = 3.0 - 1.0;
  const RadialTrace k = kelvin_transform(singular_solution_trace(P), 3, 0.5, 1.7);
  for (double r : {0.1, 1.0, 10.0}) {
    CHECK(rel_err(k(r), A * std::pow(1.7, g - 2.0 * beta) * std::pow(r, -(g - beta))) <= 1e-12);
  }
  REQUIRE(k.tails.has_value());
  CHECK(k.tails->beta_left == doctest::Approx(g - beta));
  CHECK(*k.homogeneity == doctest::Approx(-(g - beta)));
}

TEST_CASE("image outside the data") {
  RadialTrace sampled;
  sampled.radii = log_grid(0.5, 2.0, 9);
  for (double r : sampled.radii) sampled.values.push_back(1.0 / r);
  const PointFunction k = kelvin_transform(sampled, {1.0, 0.0}, 2, 0.5, 1.0);
  CHECK(code_of([&] { k({1.0, 0.01}); }) == ErrorCode::ImageOutsideDomain);
  CHECK(code_of([&] { k({1.0, 0.0}); }) == ErrorCode::ExcludedPoint);
  CHECK(std::isfinite(k({2.0, 0.0})));
}

TEST_CASE("transformed boundary condition on the exact field") {
  const Params& P = base();
  const AxiField E = singular_extension(P);
  CHECK(3.0 + 1.0 - 1.8 * 2.0 == doctest::Approx(0.4));  // p* at (3, 1/2, 1.8)
  for (double lam : {0.5, 1.0, 2.0}) {
    const Point c{0.3, -0.2, 0.5};
    const std::vector<Point> ys{{1.0, 0.2, 0.1}, {-0.5, 0.4, 2.0}, {0.3 + lam, -0.2, 0.5}, {0.3 + 2.0 * lam, -0.2, 0.5}};
    for (double r : transformed_equation_residual(E, c, lam, ys, P)) CHECK(std::abs(r) <= 1e-3);
  }
  // the factor itself: 1 on the sphere and 2^{-0.4} at twice the radius
  const double lam = 0.7;
  const Point c{1.0, 0.0, 0.0};
  const ExtFunction K = kelvin_transform(E, c, lam);
  const Point on{1.0 + lam, 0.0, 0.0};
  const Point twice{1.0 + 2.0 * lam, 0.0, 0.0};
  const double cs = neumann_factor(0.5);
  const double lhs_on = neumann_limit([&](double t) { return K(on, t); }, lam, 0.5);
  CHECK(rel_err(lhs_on, cs * std::pow(K(on, 0.0), 1.8)) <= 1e-6);
  const double lhs_twice = neumann_limit([&](double t) { return K(twice, t); }, lam, 0.5);
  CHECK(rel_err(lhs_twice, std::pow(2.0, -0.4) * cs * std::pow(K(twice, 0.0), 1.8)) <= 1e-6);

  CHECK(code_of([&] { transformed_equation_residual(E, c, lam, {c}, P); }) == ErrorCode::ExcludedPoint);
  const Point y0{1.0 - lam * lam, 0.0, 0.0};
  CHECK(code_of([&] { transformed_equation_residual(E, c, lam, {y0}, P); }) == ErrorCode::ExcludedPoint);
}

TEST_CASE("moving spheres on the singular solution") {
  const Params& P = base();
  const RadialTrace u = singular_solution_trace(P);
  double bar_one = 0.0;
  for (double R : {0.5, 1.0, 2.0}) {
    const auto grid = uniform_lambdas(R, 100);
    const auto rep = moving_sphere_scan(u, 3, 0.5, {0.0, R, 0.0}, grid);
    const double step = grid[1] - grid[0];
    CHECK(std::abs(rep.lambda_bar - R) <= step);
    CHECK(rep.lambda_bar <= R);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (grid[k] <= R - step) CHECK(rep.deficits[k] <= 1e-10);
    }
    if (R == 1.0) bar_one = rep.lambda_bar;
    if (R == 2.0) CHECK(rel_err(rep.lambda_bar, 2.0 * bar_one) <= 1e-12);
    REQUIRE(rep.excluded_points.size() == 2);
    CHECK(norm(rep.excluded_points[0]) == 0.0);
  }
}

TEST_CASE("moving spheres: constants and a fast-decaying profile") {
  const auto c = make_trace([](double) { return 2.0; }, log_grid(1e-3, 1e3, 9), TailSpec{0.0, 0.0});
  const auto rep = moving_sphere_scan(c, 3, 0.5, {1.5, 0.0, 0.0}, uniform_lambdas(1.5, 30));
  CHECK(rep.lambda_bar == doctest::Approx(1.5));
  for (double d : rep.deficits) CHECK(d <= 1e-12);

  // Gaussian decay loses to the Kelvin prefactor far out
  const auto gauss = make_trace([](double r) { return std::exp(-r * r); }, log_grid(1e-3, 1e3, 9),
                                TailSpec{0.0, 50.0});
  const auto g = moving_sphere_scan(gauss, 3, 0.5, {1.0, 0.0, 0.0}, uniform_lambdas(1.0, 20));
  CHECK(g.lambda_bar < 1.0);
  CHECK(g.deficits.back() > 0.0);
}

TEST_CASE("moving sphere report JSON") {
  const auto rep = moving_sphere_scan(singular_solution_trace(base()), 3, 0.5, {1.0, 0.0, 0.0},
                                      uniform_lambdas(1.0, 4));
  const auto path = std::filesystem::temp_directory_path() / "fracsing_scan.json";
  write_moving_sphere_report(rep, path.string());
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("lambda_grid").size() == 4);
  CHECK(j.at("deficits").size() == 4);
  CHECK(j.at("lambda_bar").get<double>() == rep.lambda_bar);
  CHECK(j.at("center").size() == 3);
}

TEST_CASE("moving sphere failures") {
  const auto u = singular_solution_trace(base());
  CHECK(code_of([&] { moving_sphere_scan(u, 3, 0.5, {1.0, 0.0, 0.0}, {}); }) == ErrorCode::EmptyScanSet);
  CHECK(code_of([&] { moving_sphere_scan(u, 3, 0.5, {0.0, 0.0, 0.0}, {0.5}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { moving_sphere_scan(u, 3, 0.5, {1.0, 0.0, 0.0}, {0.5, 1.5}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("blow-up rescaling") {
  const Params& P = base();
  const double beta = P.beta();
  auto f = [](double r) { return std::exp(-r) + 1.0 / (1.0 + r); };
  const auto u = make_trace(f, log_grid(1e-2, 1e2, 21), TailSpec{0.0, 1.0});
  const auto same = rescale(u, 1.0, P);
  for (double r : {0.1, 1.0, 5.0}) CHECK(same(r) == u(r));
  const auto comp = rescale(rescale(u, 0.6, P), 2.5, P);
  const auto direct = rescale(u, 1.5, P);
  for (double r : {0.1, 1.0, 5.0}) CHECK(rel_err(comp(r), direct(r)) <= 1e-13);
  CHECK(rel_err(direct(2.0), std::pow(1.5, beta) * f(3.0)) <= 1e-13);

  const auto sing = singular_solution_trace(P);
  const auto fixed = rescale(sing, 3.3, P);
  for (double r : {0.01, 1.0, 40.0}) CHECK(rel_err(fixed(r), sing(r)) <= 1e-13);

  const AxiField E = singular_extension(P);
  const AxiField Es = rescale(E, 0.4, P);
  CHECK(rel_err(Es(0.7, 0.3), E(0.7, 0.3)) <= 1e-13);
  const FieldSample a = Es.polar_evaluator(0.9, 0.2);
  const FieldSample b = E.polar_evaluator(0.9, 0.2);
  CHECK(rel_err(a.dU_drho, b.dU_drho) <= 1e-13);
  CHECK(rel_err(a.W, b.W) <= 1e-13);

  CHECK(code_of([&] { rescale(u, 0.0, P); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { rescale(RadialTrace{}, 2.0, P); }) == ErrorCode::EmptyDomain);
}

TEST_CASE("blow-up limit estimator") {
  const Params& P = base();
  const double A = asymptotic_constant(P);
  const double beta = P.beta();

  const auto sing = singular_solution_trace(P);
  const auto e1 = blowup_limit(sing, P);
  CHECK(rel_err(e1.A_hat, A) <= 1e-10);
  CHECK(e1.classification == SingularityType::Singular);

  const auto corr = make_trace([&](double r) { return A * std::pow(r, -beta) * (1.0 + 0.1 * std::sqrt(r)); },
                               log_grid(1e-4, 1.0, 81), TailSpec{beta, beta});
  const auto e2 = blowup_limit(corr, P);
  CHECK(rel_err(e2.A_hat, A) <= 1e-3);
  CHECK(e2.classification == SingularityType::Singular);

  const auto bounded = make_trace([](double r) { return 1.0 / (1.0 + r * r); }, log_grid(1e-4, 1.0, 81),
                                  TailSpec{0.0, 2.0});
  const auto e3 = blowup_limit(bounded, P);
  CHECK(e3.classification == SingularityType::Removable);
  CHECK(std::abs(e3.A_hat) <= 1e-3 * A);

  // estimator commutes with the blow-up rescaling on homogeneous tails
  for (double lam : {0.5, 2.0}) {
    CHECK(rel_err(blowup_limit(rescale(sing, lam, P), P).A_hat, e1.A_hat) <= 1e-12);
  }

  const auto wobbly = make_trace([&](double r) { return A * std::pow(r, -beta) * (1.0 + 0.1 * std::sin(std::log(r))); },
                                 log_grid(1e-5, 1.0, 101), TailSpec{beta, beta});
  CHECK(code_of([&] { blowup_limit(wobbly, P); }) == ErrorCode::NonconvergentExtrapolation);
  const auto shallow = make_trace([](double) { return 1.0; }, log_grid(1e-2, 1.0, 11), TailSpec{0.0, 0.0});
  CHECK(code_of([&] { blowup_limit(shallow, P); }) == ErrorCode::EmptyWindow);
}
