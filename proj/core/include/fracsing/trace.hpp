#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracsing/error.hpp"

namespace fracsing {

/// Power-law behaviour u(r) ~ c r^{-beta_left} as r -> 0 and
/// u(r) ~ c' r^{-beta_right} as r -> infinity. A bounded trace has
/// beta_left = 0; a trace decaying like the fundamental solution has
/// beta_right = n - 2 sigma.
struct TailSpec {
  double beta_left = 0.0;
  double beta_right = 0.0;
};

/// A radial function r -> u(r) sampled on increasing radii, optionally
/// backed by a closed form.
struct RadialTrace {
  std::vector<double> radii;
  std::vector<double> values;
  std::function<double(double)> evaluator;
  /// Degree d with u(l r) = l^d u(r), e.g. -beta for the singular solution.
  std::optional<double> homogeneity;
  std::optional<TailSpec> tails;

  bool has_evaluator() const noexcept { return static_cast<bool>(evaluator); }

  /// Closed form when present, otherwise log-log linear interpolation
  /// between samples with power-law continuation from the declared tails.
  double operator()(double r) const;

  /// Checks sizes, ordering, finiteness and sign; throws InvalidArgument.
  void validate() const;
};

/// count log-spaced radii in [r_min, r_max].
std::vector<double> log_grid(double r_min, double r_max, int count);

/// Samples f on the radii and keeps f as the evaluator.
RadialTrace make_trace(std::function<double(double)> f, std::vector<double> radii,
                       std::optional<TailSpec> tails,
                       std::optional<double> homogeneity = std::nullopt);

/// CSV `r,u` plus a sidecar JSON {beta_left, beta_right, homogeneity}.
/// Returns the sidecar path actually written ("" when there is no metadata).
std::string write_trace(const RadialTrace& u, const std::string& csv_path);
RadialTrace read_trace(const std::string& csv_path);

}  // namespace fracsing
