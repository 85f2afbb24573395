#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracsing/error.hpp"

namespace fracsing {

/// Value and first derivatives of an axisymmetric field at polar position
/// (rho, theta), theta measured from the plane t = 0.
/// W = t^{1-2s} rho^{-1} dU/dtheta, which stays bounded as theta -> 0.
struct FieldSample {
  double U;
  double dU_drho;
  double W;
};

/// Tensor grid in xi = log(rho) and eta = int_0^theta sin^{2s-1}. Both
/// uniform; theta holds theta(eta_j).
struct PolarGrid {
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<double> theta;

  std::size_t rows() const noexcept { return xi.size(); }
  std::size_t cols() const noexcept { return eta.size(); }
};

/// Axisymmetric field U(s, t) on the closed upper half-plane, s = |x|.
/// Samples live in (s, t, values); when `grid` is set they are the grid nodes
/// in row-major order (xi outer, eta inner).
struct AxiField {
  int n = 0;
  double sigma = 0.0;
  std::optional<double> p;

  std::vector<double> s;
  std::vector<double> t;
  std::vector<double> values;
  std::optional<PolarGrid> grid;

  std::function<double(double s, double t)> evaluator;
  std::function<FieldSample(double rho, double theta)> polar_evaluator;
  std::optional<double> homogeneity;

  /// Closed form when present, otherwise interpolation on the grid.
  double operator()(double s, double t) const;
  double node(std::size_t i, std::size_t j) const { return values[i * grid->cols() + j]; }
};

/// eta(theta) = int_0^theta sin^{2s-1}, and its inverse.
double eta_of_theta(double theta, double sigma);
double theta_of_eta(double eta, double sigma);
/// eta(pi/2) = B(s, 1/2) / 2.
double eta_max(double sigma);

/// Uniform (n_xi + 1) x (n_eta + 1) node grid on [log r_in, log r_out] x [0, eta_max].
PolarGrid make_polar_grid(double inner_r, double outer_r, int n_xi, int n_eta, double sigma);

/// Fills s, t from the grid (theta measured from the plane).
void attach_grid(AxiField& f, PolarGrid grid);

/// CSV `s,t,U` plus sidecar JSON {n, sigma, p, grid_spec, homogeneity}.
std::string write_field(const AxiField& f, const std::string& csv_path);
AxiField read_field(const std::string& csv_path);

}  // namespace fracsing
