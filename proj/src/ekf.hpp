#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "autoencoder.hpp"
#include "geometry.hpp"
#include "mapping.hpp"

namespace uwbnov {

// Constant-velocity planar state: (x, y, vx, vy).
struct FilterState {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
  double t = 0.0;
};

// White-noise densities for the constant-velocity model; Q = diag scaled by dt.
struct ProcessNoise {
  double q_pos = 0.01;  // m^2/s
  double q_vel = 0.1;   // m^2/s^3
};

// Per-anchor trust and correction for one update step.
struct MeasurementContext {
  std::vector<double> variances;  // m^2
  std::vector<double> biases;     // meters, subtracted from measured ranges
  std::vector<bool> active;
};

FilterState predict(const FilterState& state, double dt, const ProcessNoise& noise);

// Rows [(x-xi)/di, (y-yi)/di, 0, 0] with di the full 3D tag-anchor distance.
// A zero-distance row cannot be normalized; it is zeroed and, when `valid` is
// supplied, flagged false there.
Eigen::MatrixXd measurement_jacobian(const Eigen::Vector4d& mean, const AnchorLayout& layout,
                                     std::vector<bool>* valid = nullptr);

// EKF update: gain K = S Ht (H S Ht + R)^-1 with the innovation measured
// against the nonlinear range prediction at the prior mean. Masked, missing
// (NaN) and degenerate anchors contribute nothing; with no usable anchor, or
// an ill-conditioned innovation covariance, the prior is returned unchanged.
FilterState correct(const FilterState& state, const RangeSample& z,
                    const MeasurementContext& ctx, const AnchorLayout& layout);

// Gauss-Newton range trilateration at the layout's tag height. Needs at
// least three usable ranges; returns nullopt when the solve breaks down.
std::optional<Pose2D> trilaterate(const std::vector<double>& ranges, const AnchorLayout& layout,
                                  const std::vector<bool>* mask = nullptr);

// Builds the per-step trust/bias context from the imputed ranges and the
// anchor activity mask.
using ContextBuilder =
    std::function<MeasurementContext(const RangeSample& imputed, const std::vector<bool>& active)>;

// Incremental filter pass. Feed samples in timestamp order; the first sample
// anchors the clock, every later one runs predict + correct. Missing (NaN)
// readings are imputed hold-last-value and stay usable until they have been
// stale for longer than staleness_cap_s, after which the anchor is masked
// (the imputed value still reaches the context builder, e.g. for scoring).
class FilterRunner {
 public:
  FilterRunner(AnchorLayout layout, ProcessNoise noise, FilterState init,
               double staleness_cap_s, ContextBuilder build_ctx);

  FilterState step(const RangeSample& sample);
  const FilterState& state() const { return state_; }
  const AnchorLayout& layout() const { return layout_; }

 private:
  AnchorLayout layout_;
  ProcessNoise noise_;
  FilterState state_;
  double staleness_cap_s_;
  ContextBuilder build_ctx_;
  bool started_ = false;
  double last_t_ = 0.0;
  std::vector<double> held_;
  std::vector<double> held_t_;
};

ContextBuilder adaptive_context_builder(AutoencoderModel model, CovarianceMap cmap, BiasMap bmap,
                                        bool use_bias = true);
ContextBuilder static_context_builder(double sigma2);

// First-sample trilateration, zero velocity, unit diagonal covariance.
FilterState initial_state(const RangeSample& first, const AnchorLayout& layout);

// Full filter pass with the novelty network in the loop: per sample, predict
// over dt, score the (imputed) ranges, map scores to per-anchor variance and
// bias, correct. Readings missing longer than staleness_cap_s are masked.
// use_bias = false runs the covariance-only ablation variant.
std::vector<FilterState> run_adaptive(const std::vector<RangeSample>& dataset,
                                      const AutoencoderModel& model, const CovarianceMap& cmap,
                                      const BiasMap& bmap, const AnchorLayout& layout,
                                      const ProcessNoise& noise, const FilterState& init,
                                      bool use_bias = true, double staleness_cap_s = 0.5);

// Fixed-covariance baseline: every anchor carries sigma2, no bias correction.
std::vector<FilterState> run_static(const std::vector<RangeSample>& dataset, double sigma2,
                                    const AnchorLayout& layout, const ProcessNoise& noise,
                                    const FilterState& init, double staleness_cap_s = 0.5);

}  // namespace uwbnov
