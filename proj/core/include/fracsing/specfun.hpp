#pragma once

#include "fracsing/model.hpp"

namespace fracsing {

/// log|Gamma(x)| together with the sign of Gamma(x).
struct GammaEval {
  double log_abs;
  int sign;

  double value() const;
};

/// Lanczos approximation (g = 607/128, 15 terms) in log space, with the
/// reflection formula below 1/2. Throws PoleAtNonpositiveInteger.
GammaEval log_gamma(double x);

/// Gamma(x) as a plain double; overflows to +-inf for large x.
double gamma_fn(double x);

/// Euler Beta function B(a, b) for a, b > 0.
double beta_fn(double a, double b);

/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

/// The even four-Gamma ratio
///   Lambda(alpha) = 2^{2s} G((n+2s+2a)/4) G((n+2s-2a)/4)
///                          / (G((n-2s-2a)/4) G((n-2s+2a)/4)).
/// A denominator argument within 1e-12 of a nonpositive integer gives 0;
/// a numerator argument there throws NumeratorPole.
double lambda_even(double alpha, int n, double sigma);

/// lambda(beta) with (-Delta)^s |x|^{-beta} = lambda(beta) |x|^{-beta-2s};
/// requires 0 < beta < n (BetaOutOfRange otherwise).
double power_multiplier(double beta, int n, double sigma);

/// A_{n,p,s} = Lambda((n-2s)/2 - 2s/(p-1))^{1/(p-1)}.
double asymptotic_constant(const Params& params);

/// |S^{n-1}|, the surface area of the unit sphere in R^n.
double sphere_area(int n);

/// C(n,s) = 2^{2s} s Gamma((n+2s)/2) / (pi^{n/2} Gamma(1-s)), the constant of
/// the principal-value definition of (-Delta)^s.
double frac_laplacian_constant(int n, double sigma);

/// Gamma((n+2s)/2) / (pi^{n/2} Gamma(s)), normalizing the extension kernel.
double poisson_constant(int n, double sigma);

/// 2^{1-2s} Gamma(1-s) / Gamma(s): the ratio between the weighted Neumann
/// limit -lim t^{1-2s} d_t U of the Poisson extension and (-Delta)^s u.
/// Equal to 1 at s = 1/2.
double neumann_factor(double sigma);

/// Gauss hypergeometric series 2F1(a,b;c;z) and its z-derivative, summed
/// directly. Intended for 0 <= z <= ~0.6 where the series converges fast.
struct Hyp2F1 {
  double value;
  double derivative;
};
Hyp2F1 hyp2f1_series(double a, double b, double c, double z);

}  // namespace fracsing
