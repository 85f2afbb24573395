#include "fracsing/model.hpp"

#include <cmath>
#include <sstream>

#include "fracsing/specfun.hpp"

namespace fracsing {

std::optional<ErrorCode> check_params(int n, double sigma, double p) noexcept {
  if (n < 2) return ErrorCode::DimensionTooSmall;
  if (!(sigma > 0.0 && sigma < 1.0)) return ErrorCode::SigmaOutOfRange;
  const double gap = n - 2.0 * sigma;
  if (!std::isfinite(p) || p <= n / gap) return ErrorCode::PBelowSerrin;
  if (p >= (n + 2.0 * sigma) / gap) return ErrorCode::PSupercritical;
  return std::nullopt;
}

Params validate_params(int n, double sigma, double p) {
  if (auto code = check_params(n, sigma, p)) {
    std::ostringstream msg;
    msg.precision(17);
    switch (*code) {
      case ErrorCode::DimensionTooSmall:
        msg << "n = " << n << " but n >= 2 is required";
        break;
      case ErrorCode::SigmaOutOfRange:
        msg << "sigma = " << sigma << " is not in the open interval (0, 1)";
        break;
      case ErrorCode::PBelowSerrin:
        msg << "p = " << p << " <= n/(n-2 sigma) = " << n / (n - 2.0 * sigma);
        break;
      default:
        msg << "p = " << p << " >= (n+2 sigma)/(n-2 sigma) = "
            << (n + 2.0 * sigma) / (n - 2.0 * sigma) << " (supercritical bound)";
        break;
    }
    throw Error(*code, msg.str());
  }
  return Params(n, sigma, p);
}

DerivedConstants derived_constants(const Params& params) {
  const double n = params.n();
  const double s = params.sigma();
  const double p = params.p();
  DerivedConstants c{};
  c.beta = 2.0 * s / (p - 1.0);
  c.p_star = n + 2.0 * s - p * (n - 2.0 * s);
  c.J1 = 4.0 * s / (p - 1.0) - (n - 2.0 * s);
  c.alpha = (n - 2.0 * s) / 2.0 - c.beta;
  c.A = asymptotic_constant(params);
  return c;
}

}  // namespace fracsing
