#include "fracsing/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "io.hpp"

namespace fracsing {

double RadialTrace::operator()(double r) const {
  if (evaluator) return evaluator(r);
  if (radii.empty()) throw Error(ErrorCode::MissingEvaluator, "trace has no samples");
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const std::size_t m = radii.size();
  if (r <= radii.front() || r >= radii.back()) {
    const bool left = r <= radii.front();
    const std::size_t i = left ? 0 : m - 1;
    if (r == radii[i]) return values[i];
    if (!tails) {
      throw Error(ErrorCode::UndeclaredTailBehavior,
                  "radius outside the sampled range and no tails declared");
    }
    const double b = left ? tails->beta_left : tails->beta_right;
    return values[i] * std::pow(r / radii[i], -b);
  }
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  const std::size_t hi = static_cast<std::size_t>(it - radii.begin());
  const std::size_t lo = hi - 1;
  const double u0 = values[lo];
  const double u1 = values[hi];
  const double w = std::log(r / radii[lo]) / std::log(radii[hi] / radii[lo]);
  if (u0 > 0.0 && u1 > 0.0) return u0 * std::pow(u1 / u0, w);
  return u0 + w * (u1 - u0);
}

void RadialTrace::validate() const {
  if (radii.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "radii and values differ in length");
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
      throw Error(ErrorCode::InvalidArgument, "radii must be positive and finite");
    }
    if (i > 0 && !(radii[i] > radii[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "radii must be strictly increasing");
    }
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "trace values must be finite and nonnegative");
    }
  }
}

std::vector<double> log_grid(double r_min, double r_max, int count) {
  if (!(r_min > 0.0 && r_max > r_min) || count < 2) {
    throw Error(ErrorCode::InvalidArgument, "log_grid needs 0 < r_min < r_max, count >= 2");
  }
  std::vector<double> out(count);
  const double a = std::log(r_min);
  const double h = (std::log(r_max) - a) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + h * i);
  out.front() = r_min;
  out.back() = r_max;
  return out;
}

RadialTrace make_trace(std::function<double(double)> f, std::vector<double> radii,
                       std::optional<TailSpec> tails, std::optional<double> homogeneity) {
  RadialTrace u;
  u.values.reserve(radii.size());
  for (double r : radii) u.values.push_back(f(r));
  u.radii = std::move(radii);
  u.evaluator = std::move(f);
  u.tails = tails;
  u.homogeneity = homogeneity;
  u.validate();
  return u;
}

std::string write_trace(const RadialTrace& u, const std::string& csv_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + csv_path);
    out << "r,u\n";
    for (std::size_t i = 0; i < u.radii.size(); ++i) {
      out << format_double(u.radii[i]) << ',' << format_double(u.values[i]) << '\n';
    }
  }
  if (!u.tails && !u.homogeneity) return "";
  Json meta = Json::object();
  if (u.tails) {
    meta["beta_left"] = u.tails->beta_left;
    meta["beta_right"] = u.tails->beta_right;
  }
  if (u.homogeneity) meta["homogeneity"] = *u.homogeneity;
  const std::string side = sidecar_path(csv_path);
  write_json_file(side, meta);
  return side;
}

RadialTrace read_trace(const std::string& csv_path) {
  const CsvTable table = read_csv(csv_path);
  if (table.header != std::vector<std::string>{"r", "u"}) {
    throw Error(ErrorCode::Io, csv_path + ": expected header r,u");
  }
  RadialTrace u;
  for (const auto& row : table.rows) {
    u.radii.push_back(row[0]);
    u.values.push_back(row[1]);
  }
  if (auto meta = read_json_if_exists(sidecar_path(csv_path))) {
    if (meta->contains("beta_left") && meta->contains("beta_right")) {
      u.tails = TailSpec{meta->at("beta_left").get<double>(), meta->at("beta_right").get<double>()};
    }
    if (meta->contains("homogeneity")) u.homogeneity = meta->at("homogeneity").get<double>();
  }
  u.validate();
  return u;
}

}  // namespace fracsing
