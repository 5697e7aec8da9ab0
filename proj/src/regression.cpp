#include "lrent/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace lrent {

LinearFit linear_regression(std::span<const double> x, std::span<const double> y,
                            std::span<const double> weights) {
  const std::size_t n = x.size();
  if (y.size() != n || (!weights.empty() && weights.size() != n))
    throw std::invalid_argument("linear_regression: length mismatch");
  if (n < 2) throw std::invalid_argument("linear_regression: need at least two points");

  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  if (!(sw > 0.0)) throw std::invalid_argument("linear_regression: weights sum to zero");
  const double mx = sx / sw, my = sy / sw;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += w(i) * dx * dx;
    sxy += w(i) * dx * dy;
    syy += w(i) * dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_regression: abscissae are all equal");

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += w(i) * r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (n > 2) fit.slope_stderr = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  return fit;
}

}  // namespace lrent
