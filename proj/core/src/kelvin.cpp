#include "fracsing/kelvin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracsing/extension.hpp"
#include "fracsing/specfun.hpp"
#include "io.hpp"

namespace fracsing {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "lambda must be positive and finite");
  }
}

double norm(const Point& y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::sqrt(s);
}

double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

void check_dim(const Point& y, int n, const char* what) {
  if (static_cast<int>(y.size()) != n) {
    std::ostringstream msg;
    msg << what << " has " << y.size() << " coordinates, expected " << n;
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

// c + lambda^2 (y - c) / d2
Point invert(const Point& y, const Point& c, double lambda, double d2) {
  Point z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = c[i] + lambda * lambda * (y[i] - c[i]) / d2;
  return z;
}

[[noreturn]] void excluded(const char* what) {
  throw Error(ErrorCode::ExcludedPoint, std::string("evaluation at ") + what);
}

double trace_at_image(const RadialTrace& u, double r) {
  if (!u.has_evaluator() && !u.tails && !u.radii.empty() &&
      (r < u.radii.front() || r > u.radii.back())) {
    std::ostringstream msg;
    msg << "image radius " << r << " outside the sampled range";
    throw Error(ErrorCode::ImageOutsideDomain, msg.str());
  }
  return u(r);
}

double field_at_image(const AxiField& U, double s, double t) {
  try {
    return U(s, t);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ROutsideField) throw Error(ErrorCode::ImageOutsideDomain, e.what());
    throw;
  }
}

}  // namespace

RadialTrace kelvin_transform(const RadialTrace& u, int n, double sigma, double lambda) {
  check_lambda(lambda);
  const double g = n - 2.0 * sigma;
  const double l2 = lambda * lambda;
  RadialTrace out;
  for (std::size_t k = u.radii.size(); k-- > 0;) {
    const double r = u.radii[k];
    // at the image radius l2 / r the prefactor is (r / lambda)^g
    out.radii.push_back(l2 / r);
    out.values.push_back(std::pow(r / lambda, g) * u.values[k]);
  }
  if (u.has_evaluator()) {
    out.evaluator = [u, g, lambda, l2](double r) { return std::pow(lambda / r, g) * u(l2 / r); };
  }
  if (u.tails) out.tails = TailSpec{g - u.tails->beta_right, g - u.tails->beta_left};
  if (u.homogeneity) out.homogeneity = -g - *u.homogeneity;
  return out;
}

AxiField kelvin_transform(const AxiField& U, double lambda) {
  check_lambda(lambda);
  const double g = U.n - 2.0 * U.sigma;
  const double l2 = lambda * lambda;
  const double sigma = U.sigma;
  AxiField out;
  out.n = U.n;
  out.sigma = U.sigma;
  out.p = U.p;
  if (U.homogeneity) out.homogeneity = -g - *U.homogeneity;
  if (U.evaluator) {
    out.evaluator = [U, g, lambda, l2](double s, double t) {
      const double rho2 = s * s + t * t;
      return std::pow(lambda * lambda / rho2, 0.5 * g) * U(l2 * s / rho2, l2 * t / rho2);
    };
  }
  if (U.polar_evaluator) {
    out.polar_evaluator = [U, g, lambda, l2, sigma](double rho, double theta) {
      const double img = l2 / rho;
      const double pre = std::pow(lambda / rho, g);
      const FieldSample f = U.polar_evaluator(img, theta);
      FieldSample k;
      k.U = pre * f.U;
      k.dU_drho = -g / rho * k.U - pre * (img / rho) * f.dU_drho;
      k.W = std::pow(rho, -2.0 * sigma) * pre * std::pow(img, 2.0 * sigma) * f.W;
      return k;
    };
  }
  if (U.grid) {
    const PolarGrid& g0 = *U.grid;
    const std::size_t N = g0.rows() - 1;
    const std::size_t cols = g0.cols();
    PolarGrid g1;
    g1.eta = g0.eta;
    g1.theta = g0.theta;
    const double two_log = 2.0 * std::log(lambda);
    for (std::size_t i = 0; i <= N; ++i) g1.xi.push_back(two_log - g0.xi[N - i]);
    out.values.resize(U.values.size());
    for (std::size_t i = 0; i <= N; ++i) {
      const double pre = std::pow(lambda / std::exp(g1.xi[i]), g);
      for (std::size_t j = 0; j < cols; ++j) out.values[i * cols + j] = pre * U.node(N - i, j);
    }
    attach_grid(out, std::move(g1));
  } else {
    for (std::size_t k = 0; k < U.values.size(); ++k) {
      const double rho2 = U.s[k] * U.s[k] + U.t[k] * U.t[k];
      out.s.push_back(l2 * U.s[k] / rho2);
      out.t.push_back(l2 * U.t[k] / rho2);
      out.values.push_back(std::pow(l2 / rho2, 0.5 * g) * U.values[k]);
    }
  }
  return out;
}

PointFunction kelvin_transform(const RadialTrace& u, const Point& center, int n, double sigma,
                               double lambda) {
  check_lambda(lambda);
  check_dim(center, n, "center");
  const double g = n - 2.0 * sigma;
  PointFunction out;
  out.n = n;
  out.sigma = sigma;
  out.f = [u, center, lambda, g](const Point& y) {
    const double d2 = dist2(y, center);
    if (d2 == 0.0) excluded("the inversion center");
    const double r = norm(invert(y, center, lambda, d2));
    if (r == 0.0) excluded("the image of the origin");
    return std::pow(lambda * lambda / d2, 0.5 * g) * trace_at_image(u, r);
  };
  return out;
}

PointFunction kelvin_transform(const PointFunction& u, const Point& center, double lambda) {
  check_lambda(lambda);
  check_dim(center, u.n, "center");
  const double g = u.n - 2.0 * u.sigma;
  PointFunction out{u.n, u.sigma, {}};
  out.f = [u, center, lambda, g](const Point& y) {
    const double d2 = dist2(y, center);
    if (d2 == 0.0) excluded("the inversion center");
    return std::pow(lambda * lambda / d2, 0.5 * g) * u(invert(y, center, lambda, d2));
  };
  return out;
}

ExtFunction kelvin_transform(const AxiField& U, const Point& center, double lambda) {
  check_lambda(lambda);
  check_dim(center, U.n, "center");
  const double g = U.n - 2.0 * U.sigma;
  ExtFunction out{U.n, U.sigma, {}};
  out.f = [U, center, lambda, g](const Point& y, double t) {
    const double d2 = dist2(y, center) + t * t;
    if (d2 == 0.0) excluded("the inversion center");
    const double s_img = norm(invert(y, center, lambda, d2));
    const double t_img = lambda * lambda * t / d2;
    if (s_img == 0.0 && t_img == 0.0) excluded("the image of the origin");
    return std::pow(lambda * lambda / d2, 0.5 * g) * field_at_image(U, s_img, t_img);
  };
  return out;
}

ExtFunction kelvin_transform(const ExtFunction& U, const Point& center, double lambda) {
  check_lambda(lambda);
  check_dim(center, U.n, "center");
  const double g = U.n - 2.0 * U.sigma;
  ExtFunction out{U.n, U.sigma, {}};
  out.f = [U, center, lambda, g](const Point& y, double t) {
    const double d2 = dist2(y, center) + t * t;
    if (d2 == 0.0) excluded("the inversion center");
    return std::pow(lambda * lambda / d2, 0.5 * g) *
           U(invert(y, center, lambda, d2), lambda * lambda * t / d2);
  };
  return out;
}

std::vector<double> transformed_equation_residual(const AxiField& U, const Point& center, double lambda,
                                                  const std::vector<Point>& test_points,
                                                  const Params& params) {
  check_lambda(lambda);
  const int n = params.n();
  check_dim(center, n, "center");
  const double sigma = params.sigma();
  const double p = params.p();
  const double p_star = n + 2.0 * sigma - p * (n - 2.0 * sigma);
  const double cs = neumann_factor(sigma);
  const ExtFunction K = kelvin_transform(U, center, lambda);

  const double c_norm = norm(center);
  Point y0;  // image of the origin; only defined off-center
  if (c_norm > 0.0) y0 = invert(Point(n, 0.0), center, lambda, c_norm * c_norm);
  const double guard = 1e-9 * std::max({lambda, c_norm, 1.0});

  std::vector<double> out;
  for (const Point& y : test_points) {
    check_dim(y, n, "test point");
    const double d = std::sqrt(dist2(y, center));
    if (d <= guard) excluded("the inversion center");
    double scale = d;
    if (c_norm > 0.0) {
      const double to_y0 = std::sqrt(dist2(y, y0));
      if (to_y0 <= guard) excluded("the image of the origin");
      scale = std::min(scale, to_y0);
    } else if (d <= guard) {
      excluded("the origin");
    }
    const double rhs = cs * std::pow(lambda / d, p_star) * std::pow(K(y, 0.0), p);
    const double lhs = neumann_limit([&](double t) { return K(y, t); }, scale, sigma);
    out.push_back((lhs - rhs) / rhs);
  }
  return out;
}

MovingSphereReport moving_sphere_scan(const RadialTrace& u, int n, double sigma, const Point& x,
                                      const std::vector<double>& lambda_grid,
                                      const ScanOptions& opts) {
  check_dim(x, n, "center");
  const double R = norm(x);
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "the scan center must differ from 0");
  if (lambda_grid.empty()) throw Error(ErrorCode::EmptyScanSet, "empty lambda grid");
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    const double l = lambda_grid[k];
    if (!(l > 0.0) || l > R * (1.0 + 1e-12) || (k > 0 && !(l > lambda_grid[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "lambda grid must increase inside (0, |x|]");
    }
  }
  if (opts.radial_samples < 2 || opts.angular_samples < 2) {
    throw Error(ErrorCode::EmptyScanSet, "scan needs at least 2 radial and 2 angular samples");
  }
  const double g = n - 2.0 * sigma;

  MovingSphereReport rep;
  rep.center = x;
  rep.center_radius = R;
  rep.lambda_grid = lambda_grid;

  // (a, b): coordinates in the plane spanned by x and any orthogonal direction
  std::vector<double> phis(opts.angular_samples);
  for (int k = 0; k < opts.angular_samples; ++k) {
    phis[k] = std::numbers::pi * k / (opts.angular_samples - 1);
  }
  bool holding = true;
  for (double lam : lambda_grid) {
    const double l2 = lam * lam;
    double worst = -INFINITY;
    double sup_u = 0.0;
    std::size_t count = 0;
    auto visit = [&](double a, double b) {
      const double da = a - R;
      const double d2 = da * da + b * b;
      if (d2 < l2 * (1.0 - 1e-14)) return;
      const double ry = std::hypot(a, b);
      const double za = R + l2 * da / d2;
      const double zb = l2 * b / d2;
      const double rz = std::hypot(za, zb);
      if (ry <= 1e-14 * R || rz <= 1e-14 * R) return;  // origin and its image
      const double uy = u(ry);
      const double uk = std::pow(l2 / d2, 0.5 * g) * u(rz);
      worst = std::max(worst, uk - uy);
      sup_u = std::max(sup_u, std::abs(uy));
      ++count;
    };
    for (double rho : log_grid(lam, opts.outer_factor * lam, opts.radial_samples)) {
      for (double phi : phis) visit(R + rho * std::cos(phi), rho * std::sin(phi));
    }
    for (int k = 1; k <= opts.origin_rings; ++k) {
      const double ring = R * std::pow(10.0, -k);
      for (double phi : phis) visit(ring * std::cos(phi), ring * std::sin(phi));
    }
    if (count == 0) throw Error(ErrorCode::EmptyScanSet, "no admissible scan points");
    rep.deficits.push_back(worst);
    holding = holding && worst <= opts.tol * sup_u;
    if (holding) rep.lambda_bar = lam;
  }
  rep.excluded_points.push_back(Point(n, 0.0));
  Point y0(x);
  for (double& v : y0) v *= 1.0 - rep.lambda_bar * rep.lambda_bar / (R * R);
  rep.excluded_points.push_back(y0);
  return rep;
}

void write_moving_sphere_report(const MovingSphereReport& report, const std::string& json_path) {
  Json j;
  j["center"] = report.center;
  j["lambda_grid"] = report.lambda_grid;
  j["deficits"] = report.deficits;
  j["lambda_bar"] = report.lambda_bar;
  write_json_file(json_path, j);
}

RadialTrace rescale(const RadialTrace& u, double lambda, const Params& params) {
  check_lambda(lambda);
  if (u.radii.empty() && !u.has_evaluator()) throw Error(ErrorCode::EmptyDomain, "empty trace");
  const double beta = params.beta();
  const double f = std::pow(lambda, beta);
  RadialTrace out;
  for (std::size_t k = 0; k < u.radii.size(); ++k) {
    out.radii.push_back(u.radii[k] / lambda);
    out.values.push_back(f * u.values[k]);
  }
  if (u.has_evaluator()) out.evaluator = [u, f, lambda](double r) { return f * u(lambda * r); };
  out.tails = u.tails;
  out.homogeneity = u.homogeneity;
  return out;
}

AxiField rescale(const AxiField& U, double lambda, const Params& params) {
  check_lambda(lambda);
  if (U.values.empty() && !U.evaluator && !U.polar_evaluator) {
    throw Error(ErrorCode::EmptyDomain, "empty field");
  }
  const double beta = params.beta();
  const double sigma = U.sigma;
  const double f = std::pow(lambda, beta);
  AxiField out;
  out.n = U.n;
  out.sigma = U.sigma;
  out.p = U.p;
  out.homogeneity = U.homogeneity;
  for (double v : U.values) out.values.push_back(f * v);
  if (U.evaluator) {
    out.evaluator = [U, f, lambda](double s, double t) { return f * U(lambda * s, lambda * t); };
  }
  if (U.polar_evaluator) {
    const double fw = std::pow(lambda, beta + 2.0 * sigma);
    out.polar_evaluator = [U, f, fw, lambda](double rho, double theta) {
      const FieldSample s = U.polar_evaluator(lambda * rho, theta);
      return FieldSample{f * s.U, f * lambda * s.dU_drho, fw * s.W};
    };
  }
  if (U.grid) {
    PolarGrid g = *U.grid;
    const double shift = std::log(lambda);
    for (double& x : g.xi) x -= shift;
    attach_grid(out, std::move(g));
  } else {
    for (std::size_t k = 0; k < U.s.size(); ++k) {
      out.s.push_back(U.s[k] / lambda);
      out.t.push_back(U.t[k] / lambda);
    }
  }
  return out;
}

namespace {

struct Fit {
  double a;
  double b;
  double gamma;
  double rss;
};

// least squares m ~ a + b x^gamma at fixed gamma
Fit fit_at(const std::vector<double>& x, const std::vector<double>& m, double gamma) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = std::pow(x[i], gamma);
    sx += xi;
    sy += m[i];
    sxx += xi * xi;
    sxy += xi * m[i];
  }
  const double det = k * sxx - sx * sx;
  Fit f{sy / k, 0.0, gamma, 0.0};
  if (std::abs(det) > 1e-300) {
    f.b = (k * sxy - sx * sy) / det;
    f.a = (sy - f.b * sx) / k;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = m[i] - f.a - f.b * std::pow(x[i], gamma);
    f.rss += e * e;
  }
  return f;
}

Fit best_fit(const std::vector<double>& x, const std::vector<double>& m) {
  Fit best = fit_at(x, m, 1.0);
  double g_best = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const Fit f = fit_at(x, m, 0.01 * k);
    if (f.rss < best.rss) {
      best = f;
      g_best = 0.01 * k;
    }
  }
  // golden section around the grid minimum
  double lo = std::max(1e-3, g_best - 0.01);
  double hi = std::min(1.0, g_best + 0.01);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double g1 = hi - phi * (hi - lo);
    const double g2 = lo + phi * (hi - lo);
    if (fit_at(x, m, g1).rss < fit_at(x, m, g2).rss) hi = g2; else lo = g1;
  }
  const Fit refined = fit_at(x, m, 0.5 * (lo + hi));
  return refined.rss < best.rss ? refined : best;
}

}  // namespace

BlowupEstimate blowup_limit(const RadialTrace& u, const Params& params,
                            const std::vector<Interval>& windows, double threshold) {
  const double beta = params.beta();
  const double A = asymptotic_constant(params);
  std::vector<Interval> wins = windows;
  if (wins.empty()) {
    if (u.radii.size() < 2) throw Error(ErrorCode::EmptyWindow, "trace has no sampled range");
    const double outer = u.radii.back();
    const double inner = u.radii.front();
    if (inner > 1e-4 * outer * (1.0 + 1e-12)) {
      throw Error(ErrorCode::EmptyWindow, "trace must be sampled down to 1e-4 of its outer radius");
    }
    for (double r = outer; r / 10.0 >= inner * (1.0 - 1e-12); r /= 10.0) wins.push_back({r / 10.0, r});
  }
  if (wins.size() < 3) throw Error(ErrorCode::EmptyWindow, "need at least three windows");

  BlowupEstimate est{};
  for (const Interval& w : wins) {
    if (!(w.lo > 0.0 && w.hi > w.lo)) throw Error(ErrorCode::EmptyWindow, "degenerate window");
    // mean of r^beta u over the window in log r, composite Simpson
    const int m = 64;
    const double a = std::log(w.lo);
    const double h = (std::log(w.hi) - a) / m;
    double sum = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double r = std::exp(a + k * h);
      const double c = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      sum += c * std::pow(r, beta) * u(r);
    }
    est.window_means.push_back(sum * h / 3.0 / (m * h));
    est.window_radii.push_back(std::sqrt(w.lo * w.hi));
  }
  const Fit f = best_fit(est.window_radii, est.window_means);
  est.gamma = f.gamma;
  double top = 0.0;
  for (double v : est.window_means) top = std::max(top, std::abs(v));
  const double rms = std::sqrt(f.rss / static_cast<double>(est.window_means.size()));

  // outer to inner
  std::vector<std::size_t> order(wins.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return est.window_radii[l] > est.window_radii[r]; });
  bool shrinking = true;
  for (std::size_t k = 1; k < order.size(); ++k) {
    shrinking = shrinking && est.window_means[order[k]] < est.window_means[order[k - 1]];
  }
  const double innermost = est.window_means[order.back()];

  if (rms <= 1e-3 * top) {
    est.A_hat = f.a;
    est.classification = f.a > threshold * A ? SingularityType::Singular : SingularityType::Removable;
    return est;
  }
  if (shrinking && innermost < threshold * A) {
    // decays faster than the fitted family can follow; the innermost mean
    // is the best available bound on the limit
    est.A_hat = innermost;
    est.classification = SingularityType::Removable;
    return est;
  }
  std::ostringstream msg;
  msg.precision(10);
  msg << "window means of r^beta u do not follow a + b r^gamma (rms " << rms << "):";
  for (double v : est.window_means) msg << ' ' << v;
  throw Error(ErrorCode::NonconvergentExtrapolation, msg.str());
}

std::string_view to_string(SingularityType t) noexcept {
  return t == SingularityType::Singular ? "singular-type" : "removable-type";
}

}  // namespace fracsing
