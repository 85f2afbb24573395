#pragma once

// Finite-volume geometry of the half-annulus scheme, shared by the solver and
// the discrete Neumann trace. Not installed.
//
// Dual cells around the nodes (xi_i, eta_j). With k = n - 2s and
// w = cos^{n-1} sin^{1-2s}:
//   xi-face  i+1/2 : T_i W_j (U_{i+1,j} - U_{i,j}),   T_i = 1 / int e^{-k xi}
//   eta-face j+1/2 : E_i C_j (U_{i,j+1} - U_{i,j}) / d_eta,
//                    E_i = int_cell e^{k xi},  C_j = cos^{n-1} theta_{j+1/2}
//   bottom row     : + c_s S_i U_{i,0}^p,      S_i = int_cell e^{n xi}
// and no flux through the axis theta = pi/2.

#include <vector>

#include "fracsing/field.hpp"

namespace fracsing::detail {

struct FvGeometry {
  std::size_t N = 0;  // xi intervals
  std::size_t M = 0;  // eta intervals
  double d_eta = 0.0;
  std::vector<double> T;  // N
  std::vector<double> E;  // N + 1
  std::vector<double> S;  // N + 1
  std::vector<double> W;  // M + 1
  std::vector<double> C;  // M
};

FvGeometry fv_geometry(int n, double sigma, const PolarGrid& g);

/// Conservative divergence at (i, j) without the boundary source term.
/// `u(i, j)` reads the full nodal field.
template <class F>
double fv_divergence(const FvGeometry& geo, F&& u, std::size_t i, std::size_t j) {
  const double c = u(i, j);
  double r = geo.T[i] * geo.W[j] * (u(i + 1, j) - c) - geo.T[i - 1] * geo.W[j] * (c - u(i - 1, j));
  if (j < geo.M) r += geo.E[i] * geo.C[j] * (u(i, j + 1) - c) / geo.d_eta;
  if (j > 0) r -= geo.E[i] * geo.C[j - 1] * (c - u(i, j - 1)) / geo.d_eta;
  return r;
}

/// Sum of the stencil coefficients at (i, j); the natural residual scale.
inline double fv_scale(const FvGeometry& geo, std::size_t i, std::size_t j) {
  double d = (geo.T[i] + geo.T[i - 1]) * geo.W[j];
  if (j < geo.M) d += geo.E[i] * geo.C[j] / geo.d_eta;
  if (j > 0) d += geo.E[i] * geo.C[j - 1] / geo.d_eta;
  return d;
}

}  // namespace fracsing::detail
