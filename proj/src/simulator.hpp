#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "trajectory.hpp"

namespace uwbnov {

struct Segment2D {
  Vec2 a;
  Vec2 b;
};

struct RectFootprint {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;
};

// A planar blocker between tag and anchor. Bias fields left unset fall back
// to the channel defaults. A default-constructed window spans the whole run.
struct Obstacle {
  std::variant<Segment2D, RectFootprint> footprint = Segment2D{};
  double t_start = 0.0;
  double t_end = std::numeric_limits<double>::infinity();
  std::optional<double> nlos_bias_mean;
  std::optional<double> nlos_noise_sigma;
};

struct ChannelModel {
  double los_noise_sigma = 0.05;
  double los_bias_mean = 0.0;  // constant ranging offset present even in LoS
  double nlos_default_bias = 0.4;
  double nlos_noise_sigma = 0.1;
  double outlier_prob = 0.01;
  double outlier_magnitude = 1.0;
  std::uint64_t rng_seed = 0;
};

struct ScenarioSpec {
  std::string id;  // "1".."9" for built-ins, free-form otherwise
  AnchorLayout layout;
  TrajectorySpec trajectory;
  std::vector<Obstacle> obstacles;
  ChannelModel channel;
};

// Inclusive 2D segment intersection: shared endpoints, T-junctions and
// collinear overlap all count as intersecting.
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2);

// Inclusive segment-vs-axis-aligned-rectangle test: grazing an edge or a
// single corner counts as a hit.
bool segment_hits_rect(const Vec2& a, const Vec2& b, const RectFootprint& r);

// True iff the tag->anchor sightline (projected to the floor plane) crosses
// any obstacle whose active window contains t. Window bounds are inclusive.
bool is_occluded(const Pose2D& pose, const Anchor& anchor,
                 const std::vector<Obstacle>& obstacles, double t);

// Walks the scenario trajectory and synthesizes one RangeSample per pose:
//   range = true_range + los_bias_mean + N(0, los_noise_sigma)
//         + max(0, N(bias_mean, nlos_noise_sigma))   when occluded
//         + outlier_magnitude                        with prob outlier_prob
// clamped to stay positive. When several obstacles occlude the same anchor
// the first one in list order supplies the bias parameters. Deterministic:
// the same spec (seeds included) always yields the same samples.
std::vector<RangeSample> simulate_ranges(const ScenarioSpec& scenario);

}  // namespace uwbnov
