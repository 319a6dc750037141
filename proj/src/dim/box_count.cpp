#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "kdim/dim.hpp"
#include "kdim/fit.hpp"
#include "kdim/format.hpp"

namespace kdim {

namespace {

// k with scale == 2^-k, or throws.
int dyadic_exponent(double scale) {
  int e = 0;
  const double mant = std::frexp(scale, &e);
  const int k = 1 - e;
  if (!(scale > 0.0) || mant != 0.5 || k < 1 || k > 64) {
    throw ValidationError("box-count scale " + format_real(scale) +
                          " is not 2^-k with 1 <= k <= 64");
  }
  return k;
}

std::size_t count_distinct_rows(const std::vector<std::uint64_t>& keys, std::size_t stride) {
  const std::size_t rows = keys.size() / stride;
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(keys.begin() + a * stride, keys.begin() + (a + 1) * stride,
                                        keys.begin() + b * stride, keys.begin() + (b + 1) * stride);
  };
  std::sort(order.begin(), order.end(), row_less);
  std::size_t distinct = rows == 0 ? 0 : 1;
  for (std::size_t i = 1; i < rows; ++i) {
    if (row_less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

}  // namespace

std::vector<double> dyadic_scales(int k_max) {
  if (k_max < 1 || k_max > 64) throw ValidationError("dyadic scale depth must lie in [1, 64]");
  std::vector<double> out;
  for (int k = 1; k <= k_max; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

BoxCountCurve box_count(std::span<const TorusPoint> points, std::span<const double> scales) {
  if (points.empty()) throw ValidationError("box_count: empty point set");
  const std::size_t d = points.front().dimension();
  if (d == 0) throw ValidationError("box_count: points have dimension 0");
  for (const auto& p : points) {
    if (p.dimension() != d) throw ValidationError("box_count: points differ in dimension");
  }
  std::vector<int> exponents;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    exponents.push_back(dyadic_exponent(scales[i]));
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw ValidationError("box_count: scales must be strictly decreasing");
    }
  }

  BoxCountCurve curve;
  curve.points_used = static_cast<std::int64_t>(points.size());
  curve.scales.assign(scales.begin(), scales.end());

  std::vector<std::uint64_t> keys(points.size() * d);
  for (int k : exponents) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) keys[i * d + j] = points[i][j].leading_bits(k);
    }
    curve.counts.push_back(static_cast<std::int64_t>(count_distinct_rows(keys, d)));
  }

  std::vector<std::uint64_t> exact(points.size() * d * Phase::kLimbs);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto& limbs = points[i][j].limbs();
      for (int l = 0; l < Phase::kLimbs; ++l) {
        exact[(i * d + j) * Phase::kLimbs + l] = limbs[Phase::kLimbs - 1 - l];
      }
    }
  }
  curve.distinct_points =
      static_cast<std::int64_t>(count_distinct_rows(exact, d * Phase::kLimbs));
  return curve;
}

namespace {

DimensionEstimate fit_log_log(std::vector<std::pair<double, double>> samples) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [eps, v] : samples) {
    x.push_back(std::log(1.0 / eps));
    y.push_back(std::log(v));
  }
  const LinearFit fit = least_squares(x, y);
  DimensionEstimate est;
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.fit_residual = fit.rms_residual;
  est.slope_upper = -INFINITY;
  est.slope_lower = INFINITY;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double s = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    est.slope_upper = std::max(est.slope_upper, s);
    est.slope_lower = std::min(est.slope_lower, s);
  }
  est.samples = std::move(samples);
  return est;
}

}  // namespace

DimensionEstimate box_dimension_fit(const BoxCountCurve& curve) {
  if (curve.scales.size() != curve.counts.size()) {
    throw ValidationError("box-count curve has mismatched scales and counts");
  }
  if (curve.scales.size() < 4) {
    throw InsufficientDataError("box_dimension_fit needs at least 4 scales, got " +
                                std::to_string(curve.scales.size()));
  }
  const double ceiling = kSaturationFraction * static_cast<double>(curve.distinct_points);
  std::vector<std::pair<double, double>> kept;
  std::vector<double> excluded;
  for (std::size_t i = 0; i < curve.scales.size(); ++i) {
    if (static_cast<double>(curve.counts[i]) >= ceiling) {
      excluded.push_back(curve.scales[i]);
    } else {
      kept.emplace_back(curve.scales[i], static_cast<double>(curve.counts[i]));
    }
  }
  if (kept.size() < 2) {
    throw InsufficientDataError("box_dimension_fit: " + std::to_string(excluded.size()) + " of " +
                                std::to_string(curve.scales.size()) +
                                " scales are saturated; nothing left to fit");
  }
  DimensionEstimate est = fit_log_log(std::move(kept));
  est.excluded = std::move(excluded);
  return est;
}

DimensionEstimate diophantine_dimension_fit(std::span<const InclusionSample> ladder) {
  std::vector<std::pair<double, double>> samples;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto& row = ladder[i];
    if (row.truncated) {
      throw InsufficientDataError("ladder row at epsilon " + format_real(row.epsilon) +
                                  " is truncated; filter truncated rows before fitting");
    }
    if (!(row.epsilon > 0.0) || !(row.l_hat >= 1.0)) {
      throw ValidationError("ladder rows need epsilon > 0 and l_hat >= 1");
    }
    if (i > 0 && !(row.epsilon < ladder[i - 1].epsilon)) {
      throw ValidationError("ladder epsilon must be strictly decreasing");
    }
    samples.emplace_back(row.epsilon, row.l_hat);
  }
  if (samples.size() < 4) {
    throw InsufficientDataError("diophantine_dimension_fit needs at least 4 untruncated rows, got " +
                                std::to_string(samples.size()));
  }
  return fit_log_log(std::move(samples));
}

void write_box_count_csv(std::ostream& out, const BoxCountCurve& curve) {
  out << "scale,count\n";
  for (std::size_t i = 0; i < curve.scales.size(); ++i) {
    out << format_real(curve.scales[i]) << ',' << curve.counts[i] << '\n';
  }
}

}  // namespace kdim
