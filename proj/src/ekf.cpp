#include "ekf.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"

namespace uwbnov {
namespace {

void check_finite(const FilterState& s, const char* where) {
  if (!s.mean.allFinite() || !s.cov.allFinite()) {
    throw DataError(std::string("non-finite filter state in ") + where);
  }
}

Eigen::Matrix4d symmetrized(const Eigen::Matrix4d& m) { return 0.5 * (m + m.transpose()); }

std::vector<FilterState> run_with(FilterRunner runner, const std::vector<RangeSample>& dataset) {
  std::vector<FilterState> trace;
  trace.reserve(dataset.size());
  for (const RangeSample& rs : dataset) trace.push_back(runner.step(rs));
  return trace;
}

}  // namespace

FilterRunner::FilterRunner(AnchorLayout layout, ProcessNoise noise, FilterState init,
                           double staleness_cap_s, ContextBuilder build_ctx)
    : layout_(std::move(layout)),
      noise_(noise),
      state_(init),
      staleness_cap_s_(staleness_cap_s),
      build_ctx_(std::move(build_ctx)),
      held_(layout_.size(), std::numeric_limits<double>::quiet_NaN()),
      held_t_(layout_.size(), -std::numeric_limits<double>::infinity()) {
  if (!(staleness_cap_s_ >= 0.0)) throw ConfigError("staleness cap must be non-negative");
}

FilterState FilterRunner::step(const RangeSample& rs) {
  const std::size_t n_anchors = layout_.size();
  if (rs.ranges.size() != n_anchors) {
    throw DataError("sample has " + std::to_string(rs.ranges.size()) + " ranges for " +
                    std::to_string(n_anchors) + " anchors");
  }

  // hold-last imputation with a staleness cap
  RangeSample imputed = rs;
  std::vector<bool> active(n_anchors, false);
  for (std::size_t i = 0; i < n_anchors; ++i) {
    if (std::isfinite(rs.ranges[i])) {
      held_[i] = rs.ranges[i];
      held_t_[i] = rs.t;
      active[i] = true;
    } else if (std::isfinite(held_[i])) {
      imputed.ranges[i] = held_[i];
      active[i] = rs.t - held_t_[i] <= staleness_cap_s_;
    } else {
      imputed.ranges[i] = 0.0;  // nothing ever seen; masked below
      active[i] = false;
    }
  }

  if (!started_) {
    started_ = true;
    state_.t = rs.t;
  } else {
    const double dt = rs.t - last_t_;
    if (!(dt > 0.0)) throw DataError("timestamps must strictly increase");
    state_ = predict(state_, dt, noise_);
    const MeasurementContext ctx = build_ctx_(imputed, active);
    state_ = correct(state_, imputed, ctx, layout_);
  }
  last_t_ = rs.t;
  return state_;
}

ContextBuilder adaptive_context_builder(AutoencoderModel model, CovarianceMap cmap, BiasMap bmap,
                                        bool use_bias) {
  cmap.validate();
  if (use_bias) bmap.validate();
  return [model = std::move(model), cmap, bmap, use_bias](const RangeSample& imputed,
                                                          const std::vector<bool>& active) {
    const NoveltyVector nv = novelty_score(model, imputed.ranges);
    MeasurementContext ctx;
    ctx.variances.resize(nv.scores.size());
    ctx.biases.resize(nv.scores.size());
    ctx.active = active;
    for (std::size_t i = 0; i < nv.scores.size(); ++i) {
      ctx.variances[i] = covariance_of(nv.scores[i], cmap);
      ctx.biases[i] = use_bias ? bias_of(nv.scores[i], bmap) : 0.0;
    }
    return ctx;
  };
}

ContextBuilder static_context_builder(double sigma2) {
  if (!(sigma2 > 0.0)) throw ConfigError("static filter variance must be positive");
  return [sigma2](const RangeSample&, const std::vector<bool>& active) {
    MeasurementContext ctx;
    ctx.variances.assign(active.size(), sigma2);
    ctx.biases.assign(active.size(), 0.0);
    ctx.active = active;
    return ctx;
  };
}

FilterState predict(const FilterState& state, double dt, const ProcessNoise& noise) {
  if (!(dt > 0.0)) throw ConfigError("predict needs dt > 0");
  check_finite(state, "predict");

  Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
  F(0, 2) = dt;
  F(1, 3) = dt;
  Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
  Q(0, 0) = Q(1, 1) = noise.q_pos * dt;
  Q(2, 2) = Q(3, 3) = noise.q_vel * dt;

  FilterState out;
  out.mean = F * state.mean;
  out.cov = symmetrized(F * state.cov * F.transpose() + Q);
  out.t = state.t + dt;
  return out;
}

Eigen::MatrixXd measurement_jacobian(const Eigen::Vector4d& mean, const AnchorLayout& layout,
                                     std::vector<bool>* valid) {
  const auto n = static_cast<Eigen::Index>(layout.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, 4);
  if (valid) valid->assign(layout.size(), true);
  const Pose2D pose{mean[0], mean[1], {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Anchor& a = layout.anchor(static_cast<std::size_t>(i));
    const double d = true_range(pose, a, layout.tag_height());
    if (d <= 0.0) {
      if (valid) (*valid)[static_cast<std::size_t>(i)] = false;
      continue;  // row stays zero: direction undefined at the anchor itself
    }
    H(i, 0) = (mean[0] - a.x) / d;
    H(i, 1) = (mean[1] - a.y) / d;
  }
  return H;
}

FilterState correct(const FilterState& state, const RangeSample& z,
                    const MeasurementContext& ctx, const AnchorLayout& layout) {
  check_finite(state, "correct");
  const std::size_t n = layout.size();
  if (z.ranges.size() != n || ctx.variances.size() != n || ctx.biases.size() != n ||
      ctx.active.size() != n) {
    throw DataError("correct: context or measurement width disagrees with the layout");
  }

  std::vector<bool> jac_ok;
  const Eigen::MatrixXd H_full = measurement_jacobian(state.mean, layout, &jac_ok);

  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ctx.active[i] || !jac_ok[i] || !std::isfinite(z.ranges[i])) continue;
    if (!(ctx.variances[i] > 0.0)) {
      throw DataError("correct: non-positive variance on anchor " + std::to_string(i));
    }
    rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (rows.empty()) return state;  // nothing usable this step

  const auto k = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd H(k, 4);
  Eigen::VectorXd nu(k);
  Eigen::VectorXd rdiag(k);
  const Pose2D pose{state.mean[0], state.mean[1], {}};
  for (Eigen::Index r = 0; r < k; ++r) {
    const auto i = static_cast<std::size_t>(rows[static_cast<std::size_t>(r)]);
    H.row(r) = H_full.row(rows[static_cast<std::size_t>(r)]);
    const double predicted = true_range(pose, layout.anchor(i), layout.tag_height());
    nu[r] = (z.ranges[i] - ctx.biases[i]) - predicted;
    rdiag[r] = ctx.variances[i];
  }

  const Eigen::MatrixXd S = H * state.cov * H.transpose() + rdiag.asDiagonal().toDenseMatrix();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success) return state;  // ill-conditioned: skip the update
  const Eigen::MatrixXd K = state.cov * H.transpose() * ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  if (!K.allFinite()) return state;

  FilterState out;
  out.t = state.t;
  out.mean = state.mean + K * nu;
  out.cov = symmetrized((Eigen::Matrix4d::Identity() - K * H) * state.cov);
  if (!out.mean.allFinite() || !out.cov.allFinite()) return state;
  return out;
}

std::optional<Pose2D> trilaterate(const std::vector<double>& ranges, const AnchorLayout& layout,
                                  const std::vector<bool>* mask) {
  const std::size_t n = layout.size();
  if (ranges.size() != n) {
    throw DataError("trilaterate: range vector width disagrees with the layout");
  }
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask && !(*mask)[i]) continue;
    if (!std::isfinite(ranges[i])) continue;
    used.push_back(i);
  }
  if (used.size() < 3) return std::nullopt;

  double cx = 0.0, cy = 0.0;
  for (std::size_t i : used) {
    cx += layout.anchor(i).x;
    cy += layout.anchor(i).y;
  }
  Eigen::Vector2d p(cx / static_cast<double>(used.size()),
                    cy / static_cast<double>(used.size()));

  for (int iter = 0; iter < 60; ++iter) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jte = Eigen::Vector2d::Zero();
    for (std::size_t i : used) {
      const Anchor& a = layout.anchor(i);
      const double d = true_range(Pose2D{p[0], p[1], {}}, a, layout.tag_height());
      if (d < 1e-12) continue;
      const Eigen::Vector2d row((p[0] - a.x) / d, (p[1] - a.y) / d);
      const double e = d - ranges[i];
      jtj += row * row.transpose();
      jte += row * e;
    }
    // Tiny Levenberg damping keeps the step defined when anchors line up.
    jtj += 1e-12 * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d step = jtj.ldlt().solve(-jte);
    if (!step.allFinite()) return std::nullopt;
    p += step;
    if (step.norm() < 1e-12) break;
  }
  if (!p.allFinite()) return std::nullopt;
  return Pose2D{p[0], p[1], {}};
}

FilterState initial_state(const RangeSample& first, const AnchorLayout& layout) {
  const auto pose = trilaterate(first.ranges, layout);
  if (!pose) {
    throw DataError("cannot initialize the filter: first sample does not trilaterate");
  }
  FilterState s;
  s.mean << pose->x, pose->y, 0.0, 0.0;
  s.cov = Eigen::Matrix4d::Identity();
  s.t = first.t;
  return s;
}

std::vector<FilterState> run_adaptive(const std::vector<RangeSample>& dataset,
                                      const AutoencoderModel& model, const CovarianceMap& cmap,
                                      const BiasMap& bmap, const AnchorLayout& layout,
                                      const ProcessNoise& noise, const FilterState& init,
                                      bool use_bias, double staleness_cap_s) {
  return run_with(FilterRunner(layout, noise, init, staleness_cap_s,
                               adaptive_context_builder(model, cmap, bmap, use_bias)),
                  dataset);
}

std::vector<FilterState> run_static(const std::vector<RangeSample>& dataset, double sigma2,
                                    const AnchorLayout& layout, const ProcessNoise& noise,
                                    const FilterState& init, double staleness_cap_s) {
  return run_with(FilterRunner(layout, noise, init, staleness_cap_s,
                               static_context_builder(sigma2)),
                  dataset);
}

}  // namespace uwbnov
