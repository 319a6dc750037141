#pragma once

#include <span>

namespace kdim {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Root-mean-square of the vertical residuals.
  double rms_residual = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y ~ intercept + slope * x. Requires at least two
// points with distinct x; throws InsufficientDataError otherwise.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace kdim
