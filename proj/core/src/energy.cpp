#include "fracsing/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "fracsing/kelvin.hpp"
#include "fracsing/specfun.hpp"
#include "interp.hpp"
#include "io.hpp"

namespace fracsing {

namespace {

using Ring = std::function<FieldSample(double theta)>;

// Columns of a grid field interpolated to radius r in log-radius, with
// 4th-order xi derivatives; angular values then come from cubic
// interpolation in eta.
Ring grid_ring(const AxiField& U, double r) {
  const PolarGrid& g = *U.grid;
  const std::size_t N = g.rows() - 1;
  const std::size_t cols = g.cols();
  const double dxi = (g.xi.back() - g.xi.front()) / static_cast<double>(N);
  const double x = (std::log(r) - g.xi.front()) / dxi;
  if (!(x >= -1e-9 && x <= static_cast<double>(N) + 1e-9)) {
    std::ostringstream msg;
    msg << "radius " << r << " outside the field's annulus [" << std::exp(g.xi.front()) << ", "
        << std::exp(g.xi.back()) << "]";
    throw Error(ErrorCode::ROutsideField, msg.str());
  }
  auto centered = [&](std::size_t i, std::size_t j) {
    return (U.node(i - 2, j) - 8.0 * U.node(i - 1, j) + 8.0 * U.node(i + 1, j) - U.node(i + 2, j)) /
           (12.0 * dxi);
  };
  auto stencil_failure = [&] {
    std::ostringstream msg;
    msg << "radius " << r << " too close to the annulus edge for centered stencils";
    throw Error(ErrorCode::DerivativeStencilFailure, msg.str());
  };
  std::vector<double> val(cols);
  std::vector<double> dxi_val(cols);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9) {
    const auto i = static_cast<std::size_t>(nearest);
    if (i < 2 || i + 2 > N) stencil_failure();
    for (std::size_t j = 0; j < cols; ++j) {
      val[j] = U.node(i, j);
      dxi_val[j] = centered(i, j);
    }
  } else {
    const long i0 = static_cast<long>(std::floor(x)) - 1;
    if (i0 < 2 || i0 + 5 > static_cast<long>(N)) stencil_failure();
    const auto w = detail::cubic_weights(x - static_cast<double>(i0));
    for (std::size_t j = 0; j < cols; ++j) {
      double v = 0.0;
      double d = 0.0;
      for (int a = 0; a < 4; ++a) {
        const auto i = static_cast<std::size_t>(i0 + a);
        v += w[a] * U.node(i, j);
        d += w[a] * centered(i, j);
      }
      val[j] = v;
      dxi_val[j] = d;
    }
  }
  const double de = g.eta.back() / static_cast<double>(cols - 1);
  std::vector<double> deta_val(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    deta_val[j] = detail::derivative4([&](std::size_t k) { return val[k]; }, j, cols, de);
  }
  const double sigma = U.sigma;
  const double w_scale = std::pow(r, -2.0 * sigma);
  return [=](double theta) {
    const double e = eta_of_theta(theta, sigma) / de;
    const std::size_t j0 = detail::cubic_window(e, cols);
    const auto w = detail::cubic_weights(e - static_cast<double>(j0));
    FieldSample out{0.0, 0.0, 0.0};
    for (int b = 0; b < 4; ++b) {
      out.U += w[b] * val[j0 + b];
      out.dU_drho += w[b] * dxi_val[j0 + b];
      out.W += w[b] * deta_val[j0 + b];
    }
    out.dU_drho /= r;
    out.W *= w_scale;
    return out;
  };
}

Ring ring_of(const AxiField& U, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::ROutsideField, "radius must be positive");
  if (U.polar_evaluator) {
    return [&U, r](double theta) { return U.polar_evaluator(r, theta); };
  }
  if (U.grid) return grid_ring(U, r);
  throw Error(ErrorCode::DerivativeStencilFailure,
              "field has neither a polar evaluator nor a grid to differentiate");
}

void check_rule(const QuadRule& rule, int n, double sigma) {
  const bool ok = rule.weight_spec && std::abs(rule.weight_spec->cos_exponent - (n - 1.0)) < 1e-12 &&
                  std::abs(rule.weight_spec->sin_exponent - (1.0 - 2.0 * sigma)) < 1e-12;
  if (!ok) throw Error(ErrorCode::InvalidArgument, "quadrature rule does not match (n, sigma)");
}

// cos^{n-1} sin^{2s-1}, for the tangential gradient written through W
const QuadRule& tangential_rule(int n, double sigma, int k) {
  static thread_local std::map<std::tuple<int, double, int>, QuadRule> cache;
  const auto key = std::make_tuple(n, sigma, k);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, angular_rule(n - 1.0, 2.0 * sigma - 1.0, k)).first;
  return it->second;
}

void check_finite(double v, double theta) {
  if (!std::isfinite(v)) throw_non_finite_sample(theta);
}

struct RingTerms {
  double rad2 = 0.0;   // (dU/drho)^2
  double cross = 0.0;  // dU/drho U
  double sq = 0.0;     // U^2
  double tang = 0.0;   // |tangential gradient|^2
  double trace = 0.0;  // u(r) = U(r, 0)
};

RingTerms ring_terms(const Ring& ring, double r, int n, double sigma, const QuadRule& rule) {
  RingTerms out;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const FieldSample f = ring(rule.nodes[i]);
    check_finite(f.U + f.dU_drho, rule.nodes[i]);
    out.rad2 += rule.weights[i] * f.dU_drho * f.dU_drho;
    out.cross += rule.weights[i] * f.dU_drho * f.U;
    out.sq += rule.weights[i] * f.U * f.U;
  }
  const QuadRule& tr = tangential_rule(n, sigma, static_cast<int>(rule.size()));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const FieldSample f = ring(tr.nodes[i]);
    check_finite(f.W, tr.nodes[i]);
    out.tang += tr.weights[i] * f.W * f.W;
  }
  out.tang *= std::pow(r, 4.0 * sigma - 2.0);
  out.trace = ring(0.0).U;
  return out;
}

double combine(const RingTerms& t, double r, const Params& params) {
  const int n = params.n();
  const double sigma = params.sigma();
  const double p = params.p();
  const double beta = params.beta();
  const double J1 = 2.0 * beta - params.gap();
  const double a = 2.0 * beta + 2.0 * sigma - n;
  const double F = sphere_area(n) * std::pow(r, n + 1.0 - 2.0 * sigma);
  const double plane = sphere_area(n) * std::pow(r, n - 1.0) *
                       (t.trace > 0.0 ? std::pow(t.trace, p + 1.0) : 0.0);
  const double cs = neumann_factor(sigma);
  return std::pow(r, a) * F * (r * t.rad2 + beta * t.cross) +
         0.5 * beta * J1 * std::pow(r, a - 1.0) * F * t.sq -
         std::pow(r, a + 1.0) * (0.5 * F * (t.rad2 + t.tang) - cs / (p + 1.0) * plane);
}

}  // namespace

QuadRule energy_rule(const Params& params, int k) {
  return hemisphere_rule(params.n(), params.sigma(), k);
}

double energy_at(const AxiField& U, double r, const Params& params, const QuadRule& rule) {
  check_rule(rule, params.n(), params.sigma());
  const Ring ring = ring_of(U, r);
  return combine(ring_terms(ring, r, params.n(), params.sigma(), rule), r, params);
}

double energy_derivative(const AxiField& U, double r, const Params& params, const QuadRule& rule) {
  check_rule(rule, params.n(), params.sigma());
  const Ring ring = ring_of(U, r);
  const double beta = params.beta();
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const FieldSample f = ring(rule.nodes[i]);
    check_finite(f.U + f.dU_drho, rule.nodes[i]);
    const double g = f.dU_drho + beta * f.U / r;
    sum += rule.weights[i] * g * g;
  }
  const int n = params.n();
  const double sigma = params.sigma();
  const double a = 2.0 * beta + 2.0 * sigma - n;
  const double J1 = 2.0 * beta - params.gap();
  return J1 * std::pow(r, a) * sphere_area(n) * std::pow(r, n + 1.0 - 2.0 * sigma) * sum;
}

EnergyCurve energy_curve(const AxiField& U, Interval r_range, int samples, const Params& params,
                         const EnergyOptions& opts) {
  if (!(r_range.lo > 0.0 && r_range.hi > r_range.lo) || samples < 2) {
    throw Error(ErrorCode::InvalidArgument, "energy curve needs 0 < r_lo < r_hi and >= 2 samples");
  }
  const QuadRule rule = energy_rule(params, opts.quad_order);
  double h = opts.fd_step;
  if (!U.polar_evaluator && U.grid) {
    h = (U.grid->xi.back() - U.grid->xi.front()) / static_cast<double>(U.grid->rows() - 1);
  }
  EnergyCurve c;
  c.radii = log_grid(r_range.lo, r_range.hi, samples);
  for (double r : c.radii) {
    c.E_values.push_back(energy_at(U, r, params, rule));
    c.dE_formula.push_back(energy_derivative(U, r, params, rule));
    auto E_at = [&](int k) { return energy_at(U, r * std::exp(k * h), params, rule); };
    const double e1p = E_at(1), e1m = E_at(-1), e2p = E_at(2), e2m = E_at(-2);
    const double e4p = E_at(4), e4m = E_at(-4);
    // dE/dxi, 4th order with steps h and 2h; dE/dr = dE/dxi / r
    const double d_h = (-e2p + 8.0 * e1p - 8.0 * e1m + e2m) / (12.0 * h);
    const double d_2h = (-e4p + 8.0 * e2p - 8.0 * e2m + e4m) / (24.0 * h);
    const double big = std::max({std::abs(e1p), std::abs(e1m), std::abs(e2p), std::abs(e2m)});
    c.dE_fd.push_back(d_h / r);
    c.dE_fd_noise.push_back((std::abs(d_h - d_2h) / 15.0 + 1e-13 * big / h) / r);
  }
  double top = 0.0;
  for (double e : c.E_values) top = std::max(top, std::abs(e));
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    c.monotone_ok.push_back(i == 0 || c.E_values[i] >= c.E_values[i - 1] - opts.monotone_tol * top);
  }
  return c;
}

void write_energy_curve(const EnergyCurve& curve, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + csv_path);
  out << "r,E,dE_formula,dE_fd,monotone_ok\n";
  for (std::size_t i = 0; i < curve.radii.size(); ++i) {
    out << format_double(curve.radii[i]) << ',' << format_double(curve.E_values[i]) << ','
        << format_double(curve.dE_formula[i]) << ',' << format_double(curve.dE_fd[i]) << ','
        << (curve.monotone_ok[i] ? "true" : "false") << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + csv_path);
}

double scaling_residual(const AxiField& U, double lambda, double s, const Params& params,
                        const QuadRule& rule) {
  if (lambda == 1.0) return 0.0;
  const AxiField scaled = rescale(U, lambda, params);
  return energy_at(U, lambda * s, params, rule) - energy_at(scaled, s, params, rule);
}

EnergyLimit energy_limit(const AxiField& U, const Params& params, const EnergyLimitOptions& opts) {
  const QuadRule rule = energy_rule(params, opts.quad_order);
  double r0 = opts.r_start;
  if (!(r0 > 0.0)) {
    if (!U.polar_evaluator && U.grid) {
      const PolarGrid& g = *U.grid;
      r0 = std::exp(g.xi[g.rows() - 3]);
    } else {
      r0 = 1.0;
    }
  }
  EnergyLimit out{0.0, INFINITY, {}, {}};
  double top = 0.0;
  std::vector<double> aitken;
  auto report = [&](const std::string& why) {
    std::ostringstream msg;
    msg.precision(12);
    msg << why << "; E along r = " << r0 << " 2^-k:";
    for (double e : out.energies) msg << ' ' << e;
    throw Error(ErrorCode::NonconvergentSequence, msg.str());
  };
  for (int k = 0; k < opts.max_levels; ++k) {
    const double r = r0 * std::ldexp(1.0, -k);
    double e;
    try {
      e = energy_at(U, r, params, rule);
    } catch (const Error& err) {
      if (k > 0 && (err.code() == ErrorCode::ROutsideField ||
                    err.code() == ErrorCode::DerivativeStencilFailure)) {
        break;
      }
      throw;
    }
    out.radii.push_back(r);
    out.energies.push_back(e);
    top = std::max(top, std::abs(e));
    const std::size_t m = out.energies.size();
    if (m >= 2 && out.energies[m - 1] > out.energies[m - 2] + 1e-12 * top) {
      report("E increases as r decreases, so it is not monotone");
    }
    if (m >= 3) {
      const double x0 = out.energies[m - 3], x1 = out.energies[m - 2], x2 = out.energies[m - 1];
      const double d1 = x2 - x1;
      const double d2 = d1 - (x1 - x0);
      aitken.push_back(std::abs(d2) > 1e-300 ? x2 - d1 * d1 / d2 : x2);
    }
    const std::size_t q = aitken.size();
    if (q >= 3) {
      const double a = aitken[q - 1];
      const double err = std::max(std::abs(a - aitken[q - 2]), std::abs(aitken[q - 2] - aitken[q - 3]));
      if (err <= opts.tol * std::max(top, 1e-300)) {
        out.value = a;
        out.error = err;
        return out;
      }
    }
  }
  report("Aitken extrapolants did not settle");
  return out;  // not reached
}

}  // namespace fracsing
