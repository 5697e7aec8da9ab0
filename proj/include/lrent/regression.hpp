#pragma once

#include <span>

namespace lrent {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Standard error of the slope from the residual variance (0 when fewer than 3 points).
  double slope_stderr = 0.0;
};

/// Least-squares line y = intercept + slope * x.
///
/// With non-empty weights, minimizes sum w_i (y_i - a - b x_i)^2 and reports the weighted R^2.
/// Throws std::invalid_argument on fewer than 2 points, mismatched lengths, or constant x.
LinearFit linear_regression(std::span<const double> x, std::span<const double> y,
                            std::span<const double> weights = {});

}  // namespace lrent
