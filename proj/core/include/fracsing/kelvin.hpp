#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracsing/field.hpp"
#include "fracsing/model.hpp"
#include "fracsing/quadrature.hpp"
#include "fracsing/trace.hpp"

namespace fracsing {

using Point = std::vector<double>;

/// A function on R^n. Off-origin Kelvin transforms of radial data are no
/// longer radial, so they come back in this form.
struct PointFunction {
  int n = 0;
  double sigma = 0.0;
  std::function<double(const Point& y)> f;
  double operator()(const Point& y) const { return f(y); }
};

/// A function on the closed upper half-space R^n x [0, inf).
struct ExtFunction {
  int n = 0;
  double sigma = 0.0;
  std::function<double(const Point& y, double t)> f;
  double operator()(const Point& y, double t) const { return f(y, t); }
};

/// Center 0: the result stays radial. Samples are mapped exactly
/// (r -> lambda^2 / r), tails and homogeneity are transformed, and the
/// evaluator is composed when present.
RadialTrace kelvin_transform(const RadialTrace& u, int n, double sigma, double lambda);
/// Center 0 for axisymmetric fields; grid fields map onto the inverted grid.
AxiField kelvin_transform(const AxiField& U, double lambda);

/// General center on {t = 0}. Throws ImageOutsideDomain when an image point
/// leaves the data (sampled traces without tails, grid annuli).
PointFunction kelvin_transform(const RadialTrace& u, const Point& center, int n, double sigma,
                               double lambda);
PointFunction kelvin_transform(const PointFunction& u, const Point& center, double lambda);
ExtFunction kelvin_transform(const AxiField& U, const Point& center, double lambda);
ExtFunction kelvin_transform(const ExtFunction& U, const Point& center, double lambda);

/// Residual of the transformed boundary condition at points y on t = 0:
/// dU_K/dnu^s(y) - c_s (lambda / |y - c|)^{p*} U_K(y, 0)^p, divided by the
/// second term (c_s = neumann_factor). Throws ExcludedPoint at the center,
/// the origin and the image of the origin.
std::vector<double> transformed_equation_residual(const AxiField& U, const Point& center, double lambda,
                                                  const std::vector<Point>& test_points,
                                                  const Params& params);

struct ScanOptions {
  int radial_samples = 160;     // log-spaced |y - x| in [lambda, outer_factor lambda]
  int angular_samples = 181;    // angle between y - x and x, in [0, pi]
  double outer_factor = 1e3;
  int origin_rings = 6;         // |y| = |x| 10^{-k}, k = 1..rings
  double tol = 1e-9;            // relative to sup u over the scan set
};

struct MovingSphereReport {
  Point center;
  double center_radius = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> deficits;
  double lambda_bar = 0.0;
  std::vector<Point> excluded_points;  // origin and y0 = x - lambda_bar^2 x / |x|^2
};

/// d(lambda) = sup (u_{x,lambda} - u) over the scan set. For radial u the
/// scan reduces to the 2-plane through 0 and x.
MovingSphereReport moving_sphere_scan(const RadialTrace& u, int n, double sigma, const Point& x,
                                      const std::vector<double>& lambda_grid,
                                      const ScanOptions& opts = {});

/// JSON {center, lambda_grid, deficits, lambda_bar}.
void write_moving_sphere_report(const MovingSphereReport& report, const std::string& json_path);

/// U^lambda(X) = lambda^{2s/(p-1)} U(lambda X).
RadialTrace rescale(const RadialTrace& u, double lambda, const Params& params);
AxiField rescale(const AxiField& U, double lambda, const Params& params);

enum class SingularityType { Removable, Singular };

struct BlowupEstimate {
  double A_hat;
  SingularityType classification;
  double gamma;                      // fitted correction exponent
  std::vector<double> window_radii;  // geometric window centers
  std::vector<double> window_means;  // mean of r^beta u(r) per window
};

/// Fit of the window means of r^beta u(r) against {1, r^gamma}, gamma in
/// (0, 1]. Empty `windows`: decades from the outermost radius down to the
/// innermost sample. Singular-type when A_hat > threshold * A.
BlowupEstimate blowup_limit(const RadialTrace& u, const Params& params,
                            const std::vector<Interval>& windows = {}, double threshold = 0.5);

std::string_view to_string(SingularityType t) noexcept;

}  // namespace fracsing
