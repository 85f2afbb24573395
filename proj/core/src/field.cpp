#include "fracsing/field.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "fracsing/quadrature.hpp"
#include "fracsing/specfun.hpp"
#include "interp.hpp"
#include "io.hpp"

namespace fracsing {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

// int_0^theta sin^{2s-1}, theta <= pi/4: Jacobi for the x^{2s-1} factor.
double eta_near_plane(double theta, double sigma) {
  static thread_local double cached_sigma = -1.0;
  static thread_local QuadRule rule;
  if (sigma != cached_sigma) {
    rule = gauss_jacobi(24, 0.0, 2.0 * sigma - 1.0);
    cached_sigma = sigma;
  }
  // x = theta (1 + y)/2
  const double e = 2.0 * sigma - 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = 0.5 * theta * (1.0 + rule.nodes[i]);
    const double ratio = x > 0.0 ? std::sin(x) / x : 1.0;
    sum += rule.weights[i] * std::pow(ratio, e);
  }
  return sum * std::pow(0.5 * theta, e + 1.0);
}

double eta_near_axis(double theta, double sigma) {
  // int_theta^{pi/2} sin^{2s-1}, smooth there
  const QuadRule gl = gauss_legendre(24, theta, kHalfPi);
  return gl.integrate([sigma](double x) { return std::pow(std::sin(x), 2.0 * sigma - 1.0); });
}

}  // namespace

double eta_max(double sigma) { return 0.5 * beta_fn(sigma, 0.5); }

double eta_of_theta(double theta, double sigma) {
  if (theta <= 0.0) return 0.0;
  if (theta >= kHalfPi) return eta_max(sigma);
  if (theta <= 0.25 * std::numbers::pi) return eta_near_plane(theta, sigma);
  return eta_max(sigma) - eta_near_axis(theta, sigma);
}

double theta_of_eta(double eta, double sigma) {
  const double top = eta_max(sigma);
  if (eta <= 0.0) return 0.0;
  if (eta >= top) return kHalfPi;
  double lo = 0.0;
  double hi = kHalfPi;
  // initial guess from eta ~ theta^{2s}/(2s)
  double th = std::min(std::pow(2.0 * sigma * eta, 1.0 / (2.0 * sigma)), 0.5 * kHalfPi);
  for (int it = 0; it < 100; ++it) {
    const double f = eta_of_theta(th, sigma) - eta;
    if (f > 0.0) hi = th; else lo = th;
    const double d = std::pow(std::sin(th), 2.0 * sigma - 1.0);
    double next = th - f / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - th) <= 1e-16 * std::max(1.0, th)) return next;
    th = next;
    if (hi - lo <= 1e-16) break;
  }
  return th;
}

PolarGrid make_polar_grid(double inner_r, double outer_r, int n_xi, int n_eta, double sigma) {
  if (!(inner_r > 0.0 && outer_r > inner_r)) {
    throw Error(ErrorCode::InvalidGeometry, "need 0 < inner_r < outer_r");
  }
  if (n_xi < 4 || n_eta < 4) throw Error(ErrorCode::InvalidArgument, "mesh too coarse");
  PolarGrid g;
  const double x0 = std::log(inner_r);
  const double x1 = std::log(outer_r);
  for (int i = 0; i <= n_xi; ++i) g.xi.push_back(x0 + (x1 - x0) * i / n_xi);
  g.xi.back() = x1;
  const double top = eta_max(sigma);
  for (int j = 0; j <= n_eta; ++j) {
    const double e = top * j / n_eta;
    g.eta.push_back(e);
    g.theta.push_back(theta_of_eta(e, sigma));
  }
  g.eta.back() = top;
  g.theta.back() = kHalfPi;
  return g;
}

void attach_grid(AxiField& f, PolarGrid grid) {
  f.s.clear();
  f.t.clear();
  for (double x : grid.xi) {
    const double rho = std::exp(x);
    for (double th : grid.theta) {
      f.s.push_back(rho * std::cos(th));
      f.t.push_back(rho * std::sin(th));
    }
  }
  f.grid = std::move(grid);
}

double AxiField::operator()(double s_, double t_) const {
  if (evaluator) return evaluator(s_, t_);
  if (!grid) throw Error(ErrorCode::MissingEvaluator, "field has neither evaluator nor grid");
  const PolarGrid& g = *grid;
  const double rho = std::hypot(s_, t_);
  const double xi = std::log(rho);
  if (!(xi >= g.xi.front() - 1e-12 && xi <= g.xi.back() + 1e-12)) {
    throw Error(ErrorCode::ROutsideField, "point outside the field's annulus");
  }
  const double eta = eta_of_theta(std::atan2(t_, s_), sigma);
  const double dx = (g.xi.back() - g.xi.front()) / (g.rows() - 1);
  const double de = g.eta.back() / (g.cols() - 1);
  const double xu = (xi - g.xi.front()) / dx;
  const double eu = eta / de;
  const std::size_t i0 = detail::cubic_window(xu, g.rows());
  const std::size_t j0 = detail::cubic_window(eu, g.cols());
  const auto wx = detail::cubic_weights(xu - static_cast<double>(i0));
  const auto we = detail::cubic_weights(eu - static_cast<double>(j0));
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) sum += wx[a] * we[b] * node(i0 + a, j0 + b);
  }
  return sum;
}

std::string write_field(const AxiField& f, const std::string& csv_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + csv_path);
    out << "s,t,U\n";
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      out << format_double(f.s[k]) << ',' << format_double(f.t[k]) << ','
          << format_double(f.values[k]) << '\n';
    }
  }
  Json meta = Json::object();
  meta["n"] = f.n;
  meta["sigma"] = f.sigma;
  if (f.p) meta["p"] = *f.p; else meta["p"] = nullptr;
  Json spec = Json::object();
  if (f.grid) {
    spec["kind"] = "polar";
    spec["xi"] = f.grid->xi;
    spec["eta"] = f.grid->eta;
  } else {
    spec["kind"] = "points";
  }
  meta["grid_spec"] = spec;
  if (f.homogeneity) meta["homogeneity"] = *f.homogeneity; else meta["homogeneity"] = nullptr;
  const std::string side = sidecar_path(csv_path);
  write_json_file(side, meta);
  return side;
}

AxiField read_field(const std::string& csv_path) {
  const CsvTable table = read_csv(csv_path);
  if (table.header != std::vector<std::string>{"s", "t", "U"}) {
    throw Error(ErrorCode::Io, csv_path + ": expected header s,t,U");
  }
  AxiField f;
  for (const auto& row : table.rows) {
    f.s.push_back(row[0]);
    f.t.push_back(row[1]);
    f.values.push_back(row[2]);
  }
  const auto meta = read_json_if_exists(sidecar_path(csv_path));
  if (!meta) throw Error(ErrorCode::Io, csv_path + ": missing sidecar JSON");
  f.n = meta->at("n").get<int>();
  f.sigma = meta->at("sigma").get<double>();
  if (!meta->at("p").is_null()) f.p = meta->at("p").get<double>();
  if (!meta->at("homogeneity").is_null()) f.homogeneity = meta->at("homogeneity").get<double>();
  const Json& spec = meta->at("grid_spec");
  if (spec.at("kind") == "polar") {
    PolarGrid g;
    g.xi = spec.at("xi").get<std::vector<double>>();
    g.eta = spec.at("eta").get<std::vector<double>>();
    for (double e : g.eta) g.theta.push_back(theta_of_eta(e, f.sigma));
    g.theta.back() = kHalfPi;
    if (g.rows() * g.cols() != f.values.size()) {
      throw Error(ErrorCode::Io, csv_path + ": grid_spec does not match the sample count");
    }
    f.grid = std::move(g);
  }
  return f;
}

}  // namespace fracsing
