#include "mapping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace uwbnov {

void CovarianceMap::validate() const {
  if (!(0.0 < sigma2_min && sigma2_min < sigma2_max)) {
    throw ConfigError("covariance map needs 0 < sigma2_min < sigma2_max");
  }
  if (!(0.0 <= e_lo && e_lo < e_hi)) {
    throw ConfigError("covariance map needs 0 <= e_lo < e_hi");
  }
}

void BiasMap::validate() const {
  if (!(m > 0.0)) throw ConfigError("bias map slope must be positive");
  if (!(q >= 0.0)) throw ConfigError("bias map intercept must be non-negative");
  if (!(b_max > q)) throw ConfigError("bias map saturation must exceed the intercept");
}

double covariance_of(double e, const CovarianceMap& map) {
  if (e <= map.e_lo) return map.sigma2_min;
  if (e >= map.e_hi) return map.sigma2_max;
  const double f = (e - map.e_lo) / (map.e_hi - map.e_lo);
  return map.sigma2_min + f * (map.sigma2_max - map.sigma2_min);
}

double bias_of(double e, const BiasMap& map) {
  return std::min(map.m * e + map.q, map.b_max);
}

BiasMap fit_bias_map(
    const std::vector<std::vector<std::pair<double, double>>>& pairs_per_anchor,
    double b_max) {
  double m_sum = 0.0, q_sum = 0.0;
  int fitted = 0;
  for (std::size_t i = 0; i < pairs_per_anchor.size(); ++i) {
    const auto& pts = pairs_per_anchor[i];
    if (pts.size() < 2) continue;
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : pts) {
      sx += x;
      sy += y;
    }
    const double n = static_cast<double>(pts.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, sx2 = 0.0;
    for (const auto& [x, y] : pts) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
      sx2 += x * x;
    }
    // Relative test: centering residue of a constant column is ~eps^2 * sx2,
    // far below this threshold, while any real spread sits far above it.
    if (sxx <= 1e-24 * sx2) continue;
    const double slope = sxy / sxx;
    m_sum += slope;
    q_sum += my - slope * mx;
    ++fitted;
  }
  if (fitted == 0) {
    throw DataError("bias fit failed: every anchor has degenerate (constant) novelty");
  }
  BiasMap out;
  out.m = m_sum / fitted;
  out.q = q_sum / fitted;
  out.b_max = b_max;
  return out;
}

}  // namespace uwbnov
