#pragma once

#include <optional>
#include <vector>

#include "fracsing/error.hpp"

namespace fracsing {

struct Interval {
  double lo;
  double hi;
};

/// Exponent pair (a, b) of the hemisphere weight cos^a(theta) sin^b(theta).
struct AngularWeight {
  double cos_exponent;
  double sin_exponent;
};

/// Nodes and positive weights. When weight_spec is empty the rule
/// approximates the plain integral of f over the domain; otherwise it
/// approximates the integral of f against cos^a sin^b on [0, pi/2].
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  Interval domain{-1.0, 1.0};
  std::optional<AngularWeight> weight_spec;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// k-point Gauss-Legendre on [-1, 1], 1 <= k <= 512.
QuadRule gauss_legendre(int k);
/// Gauss-Legendre mapped to [a, b].
QuadRule gauss_legendre(int k, double a, double b);

/// k-point Gauss-Jacobi for the weight (1-x)^alpha (1+x)^beta on [-1, 1],
/// alpha, beta > -1, built by the Golub-Welsch eigenvalue method.
QuadRule gauss_jacobi(int k, double alpha, double beta);

/// Endpoint behaviour of an integrand f(x) ~ |x - end|^exponent * smooth.
/// `finest` is the width of the innermost panel; panels grow geometrically
/// away from the endpoint.
struct EndGrading {
  double exponent = 0.0;
  double finest = 0.0;
};

struct GradedOptions {
  int points_per_panel = 20;
  double ratio = 0.15;  // width ratio between neighbouring panels
};

/// Composite rule for the plain integral of f over [a, b] with geometric
/// panels clustered at the graded ends. The innermost panel at a graded end
/// is Gauss-Jacobi for the declared exponent, the rest are Gauss-Legendre.
/// The weights absorb the Jacobi factor, so the rule is applied to f itself.
QuadRule graded_rule(double a, double b, std::optional<EndGrading> left,
                     std::optional<EndGrading> right, GradedOptions opts = {});

/// Rule for integrals of g(theta) against cos^{n-1}(theta) sin^{1-2s}(theta)
/// on [0, pi/2], with about k nodes in total (k >= 4).
QuadRule hemisphere_rule(int n, double sigma, int k);

/// Rule for cos^a sin^b on [0, pi/2] with a >= 0 and b > -1.
QuadRule angular_rule(double cos_exponent, double sin_exponent, int k);

/// Surface integral of t^{1-2s} g over the upper hemisphere of radius r in
/// R^{n+1}_+ for axisymmetric g(theta), theta measured from the plane t = 0:
/// |S^{n-1}| r^{n+1-2s} * sum_i w_i g(theta_i). Throws NonFiniteSample.
template <class G>
double integrate_hemisphere(G&& g, const QuadRule& rule, double r, int n,
                            double sigma);

/// |S^{n-1}| r^{n+1-2s}; exposed for the template above.
double hemisphere_measure_factor(double r, int n, double sigma);

[[noreturn]] void throw_non_finite_sample(double theta);

template <class G>
double integrate_hemisphere(G&& g, const QuadRule& rule, double r, int n,
                            double sigma) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = g(rule.nodes[i]);
    if (!(v - v == 0.0)) throw_non_finite_sample(rule.nodes[i]);
    sum += rule.weights[i] * v;
  }
  return hemisphere_measure_factor(r, n, sigma) * sum;
}

}  // namespace fracsing
