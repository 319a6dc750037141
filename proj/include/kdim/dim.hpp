#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "kdim/errors.hpp"
#include "kdim/torus.hpp"

namespace kdim {

struct BoxCountCurve {
  std::vector<double> scales;         // decreasing dyadic cell sides
  std::vector<std::int64_t> counts;   // occupied cells per scale
  std::int64_t points_used = 0;
  std::int64_t distinct_points = 0;
};

// Counts occupied cells of the grid with side eps = 2^-k on T^d. Dyadic sides
// tile [0,1) exactly, so cells wrap with the torus. Scales must be 2^-k with
// k >= 1, strictly decreasing. Throws ValidationError on an empty point set or
// mixed dimensions.
BoxCountCurve box_count(std::span<const TorusPoint> points, std::span<const double> scales);

// 2^-1, ..., 2^-k_max.
std::vector<double> dyadic_scales(int k_max);

struct DimensionEstimate {
  double slope = 0.0;          // least squares over the kept samples
  double slope_upper = 0.0;    // largest two-point slope between neighbours
  double slope_lower = 0.0;    // smallest two-point slope between neighbours
  double fit_residual = 0.0;   // rms of the log-log fit
  double intercept = 0.0;
  std::vector<std::pair<double, double>> samples;  // (eps, value) used
  std::vector<double> excluded;                    // eps values left out
};

// Fraction of distinct points at which a scale counts as saturated.
inline constexpr double kSaturationFraction = 0.98;

// Slope of log N vs log(1/eps). Needs >= 4 scales; scales with
// N >= 0.98 * distinct_points are dropped. Throws InsufficientDataError when
// fewer than two scales survive.
DimensionEstimate box_dimension_fit(const BoxCountCurve& curve);

struct InclusionSample {
  double epsilon = 0.0;
  double l_hat = 0.0;
  bool truncated = false;
};

// Slope of log l_hat vs log(1/eps) on >= 4 untruncated rows with strictly
// decreasing eps. Truncated rows are rejected, not skipped.
DimensionEstimate diophantine_dimension_fit(std::span<const InclusionSample> ladder);

struct BoundBracket {
  double lower = 0.0;
  double upper = 0.0;
  int m = 0;
  int n = 0;
  double nu = 0.0;
  double d = 0.0;
};

// (d - n) / n; defined for every admissible input.
double lower_dimension_bound(int n, double d);
// (1 + nu) m / (1 - nu (m - 1)); throws ValidationError unless nu (m - 1) < 1.
double upper_dimension_bound(int m, double nu);
BoundBracket theoretical_bounds(int m, int n, double nu, double d);

// di / alpha for a Hoelder exponent alpha in (0, 1].
double holder_bound(double di_base, double alpha);

// CSV: scale,count
void write_box_count_csv(std::ostream& out, const BoxCountCurve& curve);

}  // namespace kdim
