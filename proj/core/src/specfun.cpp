#include "fracsing/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fracsing {

namespace {

constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczosCoef = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

// log Gamma(x) for x >= 1/2.
double lanczos_log_gamma(double x) {
  const double z = x - 1.0;
  double series = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) {
    series += kLanczosCoef[i] / (z + static_cast<double>(i));
  }
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

bool near_nonpositive_integer(double x, double tol) {
  if (x > tol) return false;
  return std::abs(x - std::round(x)) <= tol;
}

}  // namespace

double GammaEval::value() const { return sign * std::exp(log_abs); }

double sin_pi(double x) {
  // Reduce to [-1, 1) so that integers map to exact zeros.
  double r = std::fmod(x, 2.0);
  if (r >= 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  if (r == 0.0 || r == -1.0) return 0.0;
  if (r > 0.5) return std::sin(std::numbers::pi * (1.0 - r));
  if (r < -0.5) return -std::sin(std::numbers::pi * (1.0 + r));
  return std::sin(std::numbers::pi * r);
}

GammaEval log_gamma(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, "log_gamma of a non-finite argument");
  }
  if (x <= 0.0 && x == std::round(x)) {
    std::ostringstream msg;
    msg << "Gamma has a pole at x = " << x;
    throw Error(ErrorCode::PoleAtNonpositiveInteger, msg.str());
  }
  if (x >= 0.5) return {lanczos_log_gamma(x), 1};
  // Gamma(x) Gamma(1-x) = pi / sin(pi x)
  const double s = sin_pi(x);
  GammaEval out;
  out.log_abs = std::log(std::numbers::pi) - std::log(std::abs(s)) -
                lanczos_log_gamma(1.0 - x);
  out.sign = s > 0.0 ? 1 : -1;
  return out;
}

double gamma_fn(double x) { return log_gamma(x).value(); }

double beta_fn(double a, double b) {
  return std::exp(log_gamma(a).log_abs + log_gamma(b).log_abs -
                  log_gamma(a + b).log_abs);
}

double lambda_even(double alpha, int n, double sigma) {
  constexpr double kPoleTol = 1e-12;
  const double num1 = (n + 2.0 * sigma + 2.0 * alpha) / 4.0;
  const double num2 = (n + 2.0 * sigma - 2.0 * alpha) / 4.0;
  const double den1 = (n - 2.0 * sigma - 2.0 * alpha) / 4.0;
  const double den2 = (n - 2.0 * sigma + 2.0 * alpha) / 4.0;

  if (near_nonpositive_integer(num1, kPoleTol) ||
      near_nonpositive_integer(num2, kPoleTol)) {
    std::ostringstream msg;
    msg << "Lambda(" << alpha << ") has a numerator Gamma pole";
    throw Error(ErrorCode::NumeratorPole, msg.str());
  }
  if (near_nonpositive_integer(den1, kPoleTol) ||
      near_nonpositive_integer(den2, kPoleTol)) {
    return 0.0;
  }
  const GammaEval g1 = log_gamma(num1);
  const GammaEval g2 = log_gamma(num2);
  const GammaEval g3 = log_gamma(den1);
  const GammaEval g4 = log_gamma(den2);
  const double log_ratio = 2.0 * sigma * std::log(2.0) + g1.log_abs + g2.log_abs -
                           g3.log_abs - g4.log_abs;
  return g1.sign * g2.sign * g3.sign * g4.sign * std::exp(log_ratio);
}

double power_multiplier(double beta, int n, double sigma) {
  if (!(beta > 0.0 && beta < n)) {
    std::ostringstream msg;
    msg << "beta = " << beta << " outside (0, " << n << ")";
    throw Error(ErrorCode::BetaOutOfRange, msg.str());
  }
  return lambda_even((n - 2.0 * sigma) / 2.0 - beta, n, sigma);
}

double asymptotic_constant(const Params& params) {
  const double lam = power_multiplier(params.beta(), params.n(), params.sigma());
  return std::pow(lam, 1.0 / (params.p() - 1.0));
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / gamma_fn(n / 2.0);
}

double frac_laplacian_constant(int n, double sigma) {
  const double log_c = 2.0 * sigma * std::log(2.0) + std::log(sigma) +
                       log_gamma((n + 2.0 * sigma) / 2.0).log_abs -
                       0.5 * n * std::log(std::numbers::pi) -
                       log_gamma(1.0 - sigma).log_abs;
  return std::exp(log_c);
}

double poisson_constant(int n, double sigma) {
  const double log_c = log_gamma((n + 2.0 * sigma) / 2.0).log_abs -
                       0.5 * n * std::log(std::numbers::pi) -
                       log_gamma(sigma).log_abs;
  return std::exp(log_c);
}

double neumann_factor(double sigma) {
  return std::exp((1.0 - 2.0 * sigma) * std::log(2.0) +
                  log_gamma(1.0 - sigma).log_abs - log_gamma(sigma).log_abs);
}

Hyp2F1 hyp2f1_series(double a, double b, double c, double z) {
  // coef_k = (a)_k (b)_k / ((c)_k k!)
  double coef = 1.0;
  double zk_minus1 = 1.0;  // z^{k-1} for k >= 1
  double sum = 1.0;
  double dsum = 0.0;
  for (int k = 1; k < 4000; ++k) {
    const double km1 = static_cast<double>(k - 1);
    coef *= (a + km1) * (b + km1) / ((c + km1) * static_cast<double>(k));
    const double dterm = k * coef * zk_minus1;
    const double term = coef * zk_minus1 * z;
    sum += term;
    dsum += dterm;
    zk_minus1 *= z;
    if (std::abs(term) <= 1e-17 * std::abs(sum) &&
        std::abs(dterm) <= 1e-17 * std::abs(dsum) + 1e-300) {
      break;
    }
  }
  return {sum, dsum};
}

}  // namespace fracsing
