#include "fv.hpp"

#include <cmath>
#include <numbers>

#include "fracsing/quadrature.hpp"

namespace fracsing::detail {

namespace {

// int_a^b e^{k x} dx, stable as k -> 0
double exp_integral(double k, double a, double b) {
  if (std::abs(k) < 1e-14) return b - a;
  return std::exp(k * a) * std::expm1(k * (b - a)) / k;
}

}  // namespace

FvGeometry fv_geometry(int n, double sigma, const PolarGrid& g) {
  FvGeometry geo;
  geo.N = g.rows() - 1;
  geo.M = g.cols() - 1;
  geo.d_eta = g.eta.back() / static_cast<double>(geo.M);
  const double k = n - 2.0 * sigma;
  const double dxi = (g.xi.back() - g.xi.front()) / static_cast<double>(geo.N);

  geo.T.resize(geo.N);
  for (std::size_t i = 0; i < geo.N; ++i) {
    geo.T[i] = 1.0 / exp_integral(-k, g.xi[i], g.xi[i + 1]);
  }
  geo.E.resize(geo.N + 1);
  geo.S.resize(geo.N + 1);
  for (std::size_t i = 0; i <= geo.N; ++i) {
    const double a = i == 0 ? g.xi[0] : g.xi[i] - 0.5 * dxi;
    const double b = i == geo.N ? g.xi[geo.N] : g.xi[i] + 0.5 * dxi;
    geo.E[i] = exp_integral(k, a, b);
    geo.S[i] = exp_integral(static_cast<double>(n), a, b);
  }

  std::vector<double> face(geo.M);
  for (std::size_t j = 0; j < geo.M; ++j) {
    face[j] = theta_of_eta((static_cast<double>(j) + 0.5) * geo.d_eta, sigma);
  }
  geo.C.resize(geo.M);
  for (std::size_t j = 0; j < geo.M; ++j) geo.C[j] = std::pow(std::cos(face[j]), n - 1.0);

  auto w = [n, sigma](double th) {
    return std::pow(std::cos(th), n - 1.0) * std::pow(std::sin(th), 1.0 - 2.0 * sigma);
  };
  geo.W.resize(geo.M + 1);
  GradedOptions go;
  go.points_per_panel = 24;
  const QuadRule first = graded_rule(0.0, face[0], EndGrading{1.0 - 2.0 * sigma, face[0]}, std::nullopt, go);
  geo.W[0] = first.integrate(w);
  for (std::size_t j = 1; j <= geo.M; ++j) {
    const double a = face[j - 1];
    const double b = j == geo.M ? 0.5 * std::numbers::pi : face[j];
    geo.W[j] = gauss_legendre(16, a, b).integrate(w);
  }
  return geo;
}

}  // namespace fracsing::detail
