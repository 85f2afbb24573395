#include "fracsing/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "fracsing/specfun.hpp"

namespace fracsing {

namespace {

void check_k(int k) {
  if (k < 1 || k > 512) {
    std::ostringstream msg;
    msg << "rule order k = " << k << " outside [1, 512]";
    throw Error(ErrorCode::KOutOfRange, msg.str());
  }
}

QuadRule build_gauss_jacobi(int k, double alpha, double beta) {
  const double ab = alpha + beta;
  Eigen::VectorXd diag(k);
  Eigen::VectorXd sub(std::max(k - 1, 1));
  for (int i = 0; i < k; ++i) {
    const double two_i_ab = 2.0 * i + ab;
    if (i == 0) {
      diag(i) = (beta - alpha) / (ab + 2.0);
    } else {
      diag(i) = (beta * beta - alpha * alpha) / (two_i_ab * (two_i_ab + 2.0));
    }
  }
  for (int i = 1; i < k; ++i) {
    const double di = i;
    const double two_i_ab = 2.0 * di + ab;
    double b2;
    if (i == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * di * (di + alpha) * (di + beta) * (di + ab) /
           (two_i_ab * two_i_ab * (two_i_ab + 1.0) * (two_i_ab - 1.0));
    }
    sub(i - 1) = std::sqrt(b2);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + log_gamma(alpha + 1.0).log_abs +
                              log_gamma(beta + 1.0).log_abs - log_gamma(ab + 2.0).log_abs);
  QuadRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  if (k == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(k - 1), Eigen::ComputeEigenvectors);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  for (int i = 0; i < k; ++i) {
    rule.nodes[i] = values(i);
    rule.weights[i] = mu0 * vectors(0, i) * vectors(0, i);
  }
  return rule;
}

void append_mapped(QuadRule& out, const QuadRule& ref, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.nodes.push_back(mid + half * ref.nodes[i]);
    out.weights.push_back(half * ref.weights[i]);
  }
}

// Innermost panel [end, end + h] (toward_left) or [end - h, end], integrand
// ~ |x - end|^e g(x). Weights are for the integrand itself.
void append_jacobi_panel(QuadRule& out, double end, double h, double e, int q,
                         bool at_left) {
  const double half = 0.5 * h;
  if (at_left) {
    const QuadRule& ref = [&]() -> const QuadRule& {
      static thread_local std::map<std::tuple<int, double, double>, QuadRule> cache;
      auto key = std::make_tuple(q, 0.0, e);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, build_gauss_jacobi(q, 0.0, e)).first;
      return it->second;
    }();
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double one_plus = 1.0 + ref.nodes[i];
      out.nodes.push_back(end + half * one_plus);
      out.weights.push_back(half * ref.weights[i] / std::pow(one_plus, e));
    }
  } else {
    const QuadRule& ref = [&]() -> const QuadRule& {
      static thread_local std::map<std::tuple<int, double, double>, QuadRule> cache;
      auto key = std::make_tuple(q, e, 0.0);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, build_gauss_jacobi(q, e, 0.0)).first;
      return it->second;
    }();
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const double one_minus = 1.0 - ref.nodes[i];
      out.nodes.push_back(end - half * one_minus);
      out.weights.push_back(half * ref.weights[i] / std::pow(one_minus, e));
    }
  }
}

// Breakpoints a = x0 < x1 < ... < xm = b, geometric away from a.
std::vector<double> geometric_breaks(double a, double b, double finest, double ratio) {
  std::vector<double> breaks{a};
  const double len = b - a;
  if (!(finest > 0.0) || finest >= len) {
    breaks.push_back(b);
    return breaks;
  }
  double width = finest;
  while (breaks.back() + width < b) {
    breaks.push_back(a + width);
    width /= ratio;
  }
  breaks.push_back(b);
  const std::size_t m = breaks.size();
  if (m >= 3) {
    const double last = breaks[m - 1] - breaks[m - 2];
    const double prev = breaks[m - 2] - breaks[m - 3];
    if (last < 0.3 * prev) breaks.erase(breaks.end() - 2);
  }
  return breaks;
}

// Grades [a, b] toward a (or, mirrored, toward b).
void append_graded_half(QuadRule& out, double a, double b, const EndGrading& g,
                        const GradedOptions& opts, bool toward_left) {
  const std::vector<double> offsets = geometric_breaks(0.0, b - a, g.finest, opts.ratio);
  const QuadRule gl = gauss_legendre(opts.points_per_panel);
  for (std::size_t j = 0; j + 1 < offsets.size(); ++j) {
    const double o0 = offsets[j];
    const double o1 = offsets[j + 1];
    if (toward_left) {
      if (j == 0) {
        append_jacobi_panel(out, a, o1, g.exponent, opts.points_per_panel, true);
      } else {
        append_mapped(out, gl, a + o0, a + o1);
      }
    } else {
      if (j == 0) {
        append_jacobi_panel(out, b, o1, g.exponent, opts.points_per_panel, false);
      } else {
        append_mapped(out, gl, b - o1, b - o0);
      }
    }
  }
}

void sort_rule(QuadRule& rule) {
  std::vector<std::size_t> idx(rule.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t l, std::size_t r) { return rule.nodes[l] < rule.nodes[r]; });
  QuadRule sorted;
  sorted.domain = rule.domain;
  sorted.weight_spec = rule.weight_spec;
  for (std::size_t i : idx) {
    sorted.nodes.push_back(rule.nodes[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  rule = std::move(sorted);
}

}  // namespace

QuadRule gauss_legendre(int k) {
  check_k(k);
  static thread_local std::map<int, QuadRule> cache;
  if (auto it = cache.find(k); it != cache.end()) return it->second;
  QuadRule rule;
  rule.nodes.resize(k);
  rule.weights.resize(k);
  for (int i = 0; i < (k + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= k; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // one more pass for the derivative at the converged node
        p0 = 1.0;
        p1 = x;
        for (int j = 2; j <= k; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = k * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[k - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[k - 1 - i] = w;
  }
  if (k % 2 == 1) rule.nodes[k / 2] = 0.0;
  cache.emplace(k, rule);
  return rule;
}

QuadRule gauss_legendre(int k, double a, double b) {
  QuadRule ref = gauss_legendre(k);
  QuadRule rule;
  rule.domain = {a, b};
  append_mapped(rule, ref, a, b);
  return rule;
}

QuadRule gauss_jacobi(int k, double alpha, double beta) {
  check_k(k);
  if (!(alpha > -1.0 && beta > -1.0)) {
    throw Error(ErrorCode::InvalidArgument, "Jacobi exponents must exceed -1");
  }
  return build_gauss_jacobi(k, alpha, beta);
}

QuadRule graded_rule(double a, double b, std::optional<EndGrading> left,
                     std::optional<EndGrading> right, GradedOptions opts) {
  if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "graded_rule needs a < b");
  QuadRule rule;
  rule.domain = {a, b};
  if (left && right) {
    const double mid = 0.5 * (a + b);
    append_graded_half(rule, a, mid, *left, opts, true);
    append_graded_half(rule, mid, b, *right, opts, false);
  } else if (left) {
    append_graded_half(rule, a, b, *left, opts, true);
  } else if (right) {
    append_graded_half(rule, a, b, *right, opts, false);
  } else {
    append_mapped(rule, gauss_legendre(opts.points_per_panel), a, b);
  }
  sort_rule(rule);
  return rule;
}

QuadRule angular_rule(double cos_exponent, double sin_exponent, int k) {
  if (k < 4) throw Error(ErrorCode::KOutOfRange, "angular rules need k >= 4");
  check_k(std::min(k, 512));
  const double half_pi = 0.5 * std::numbers::pi;
  const int panels = std::max(1, static_cast<int>(std::lround(std::sqrt(k / 3.0))));
  GradedOptions opts;
  opts.points_per_panel = std::max(4, k / panels);
  opts.ratio = 0.15;
  EndGrading at_zero{sin_exponent, half_pi * std::pow(opts.ratio, panels - 1)};
  if (panels == 1) at_zero.finest = half_pi;
  QuadRule rule = graded_rule(0.0, half_pi, at_zero, std::nullopt, opts);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double th = rule.nodes[i];
    rule.weights[i] *= std::pow(std::cos(th), cos_exponent) * std::pow(std::sin(th), sin_exponent);
  }
  rule.weight_spec = AngularWeight{cos_exponent, sin_exponent};
  return rule;
}

QuadRule hemisphere_rule(int n, double sigma, int k) {
  if (n < 2) throw Error(ErrorCode::DimensionTooSmall, "hemisphere rule needs n >= 2");
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw Error(ErrorCode::SigmaOutOfRange, "hemisphere rule needs 0 < sigma < 1");
  }
  return angular_rule(n - 1.0, 1.0 - 2.0 * sigma, k);
}

double hemisphere_measure_factor(double r, int n, double sigma) {
  return sphere_area(n) * std::pow(r, n + 1.0 - 2.0 * sigma);
}

void throw_non_finite_sample(double theta) {
  std::ostringstream msg;
  msg << "integrand is not finite at theta = " << theta;
  throw Error(ErrorCode::NonFiniteSample, msg.str());
}

}  // namespace fracsing
