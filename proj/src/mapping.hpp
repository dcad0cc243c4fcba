#pragma once

#include <utility>
#include <vector>

namespace uwbnov {

// Rectified-linear novelty-to-variance map: flat floor through the confident
// band, linear ramp, flat ceiling past saturation.
struct CovarianceMap {
  double sigma2_min = 0.001;  // m^2
  double sigma2_max = 0.1;    // m^2
  double e_lo = 0.025;        // ramp start (novelty units)
  double e_hi = 0.1;          // ramp end

  void validate() const;
};

// Saturated affine novelty-to-bias map. The non-zero intercept keeps a small
// correction active even on fully trusted ranges.
struct BiasMap {
  double m = 0.885;   // meters per unit novelty
  double q = 0.115;   // meters
  double b_max = 0.5; // meters

  void validate() const;
};

double covariance_of(double e, const CovarianceMap& map);
double bias_of(double e, const BiasMap& map);

// Ordinary least squares per anchor on (novelty, signed range error) pairs,
// then the arithmetic mean of the per-anchor slopes and intercepts. Anchors
// without two distinct novelty values cannot support a line and are excluded;
// all-degenerate input is an error. b_max is configuration, not a fit output.
BiasMap fit_bias_map(
    const std::vector<std::vector<std::pair<double, double>>>& pairs_per_anchor,
    double b_max = 0.5);

}  // namespace uwbnov
