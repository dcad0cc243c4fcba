#include "simulator.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace uwbnov {
namespace {

// Sign of the cross product (b-a) x (c-a). Exact for exactly representable
// inputs, which is what the intersection convention tests rely on.
int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

// c collinear with a-b assumed; true when c lies within the segment's box.
bool within_box(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

bool point_in_rect(const Vec2& p, const RectFootprint& r) {
  return r.xmin <= p.x && p.x <= r.xmax && r.ymin <= p.y && p.y <= r.ymax;
}

void validate_obstacle(const Obstacle& ob) {
  if (!(ob.t_start < ob.t_end)) {
    throw ConfigError("obstacle active window must have t_start < t_end");
  }
  if (ob.nlos_bias_mean && *ob.nlos_bias_mean < 0.0) {
    throw ConfigError("obstacle NLoS bias must be non-negative");
  }
  if (ob.nlos_noise_sigma && *ob.nlos_noise_sigma < 0.0) {
    throw ConfigError("obstacle NLoS noise sigma must be non-negative");
  }
  if (const auto* rect = std::get_if<RectFootprint>(&ob.footprint)) {
    if (!(rect->xmin <= rect->xmax) || !(rect->ymin <= rect->ymax)) {
      throw ConfigError("obstacle rectangle has inverted extents");
    }
  }
}

void validate_channel(const ChannelModel& ch) {
  if (ch.los_noise_sigma < 0.0 || ch.nlos_noise_sigma < 0.0) {
    throw ConfigError("channel noise sigmas must be non-negative");
  }
  if (ch.nlos_default_bias < 0.0) {
    throw ConfigError("channel NLoS bias must be non-negative");
  }
  if (ch.outlier_prob < 0.0 || ch.outlier_prob >= 1.0) {
    throw ConfigError("outlier probability must lie in [0, 1)");
  }
}

}  // namespace

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int d1 = orientation(p1, p2, q1);
  const int d2 = orientation(p1, p2, q2);
  const int d3 = orientation(q1, q2, p1);
  const int d4 = orientation(q1, q2, p2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && within_box(p1, p2, q1)) return true;
  if (d2 == 0 && within_box(p1, p2, q2)) return true;
  if (d3 == 0 && within_box(q1, q2, p1)) return true;
  if (d4 == 0 && within_box(q1, q2, p2)) return true;
  return false;
}

bool segment_hits_rect(const Vec2& a, const Vec2& b, const RectFootprint& r) {
  if (point_in_rect(a, r) || point_in_rect(b, r)) return true;
  const Vec2 c00{r.xmin, r.ymin};
  const Vec2 c10{r.xmax, r.ymin};
  const Vec2 c11{r.xmax, r.ymax};
  const Vec2 c01{r.xmin, r.ymax};
  return segments_intersect(a, b, c00, c10) || segments_intersect(a, b, c10, c11) ||
         segments_intersect(a, b, c11, c01) || segments_intersect(a, b, c01, c00);
}

bool is_occluded(const Pose2D& pose, const Anchor& anchor,
                 const std::vector<Obstacle>& obstacles, double t) {
  const Vec2 tag{pose.x, pose.y};
  const Vec2 site{anchor.x, anchor.y};
  for (const Obstacle& ob : obstacles) {
    if (t < ob.t_start || t > ob.t_end) continue;
    const bool hit = std::visit(
        [&](const auto& fp) {
          using T = std::decay_t<decltype(fp)>;
          if constexpr (std::is_same_v<T, Segment2D>) {
            return segments_intersect(tag, site, fp.a, fp.b);
          } else {
            return segment_hits_rect(tag, site, fp);
          }
        },
        ob.footprint);
    if (hit) return true;
  }
  return false;
}

std::vector<RangeSample> simulate_ranges(const ScenarioSpec& scenario) {
  validate_channel(scenario.channel);
  for (const Obstacle& ob : scenario.obstacles) validate_obstacle(ob);
  if (scenario.layout.size() == 0) {
    throw ConfigError("scenario has no anchor layout");
  }

  const std::vector<TimedPose> path = generate_trajectory(scenario.trajectory);
  Rng rng(derive_seed(scenario.channel.rng_seed, 0x6368616eULL));  // channel stream

  const ChannelModel& ch = scenario.channel;
  std::vector<RangeSample> out;
  out.reserve(path.size());
  for (const TimedPose& tp : path) {
    RangeSample rs;
    rs.t = tp.t;
    rs.truth = tp.pose;
    rs.ranges.resize(scenario.layout.size());
    for (std::size_t i = 0; i < scenario.layout.size(); ++i) {
      const Anchor& anchor = scenario.layout.anchor(i);
      double r = true_range(tp.pose, anchor, scenario.layout.tag_height());
      r += ch.los_bias_mean;
      r += rng.normal(0.0, ch.los_noise_sigma);

      const Vec2 tag{tp.pose.x, tp.pose.y};
      const Vec2 site{anchor.x, anchor.y};
      for (const Obstacle& ob : scenario.obstacles) {
        if (tp.t < ob.t_start || tp.t > ob.t_end) continue;
        const bool hit = std::visit(
            [&](const auto& fp) {
              using T = std::decay_t<decltype(fp)>;
              if constexpr (std::is_same_v<T, Segment2D>) {
                return segments_intersect(tag, site, fp.a, fp.b);
              } else {
                return segment_hits_rect(tag, site, fp);
              }
            },
            ob.footprint);
        if (hit) {
          const double mean = ob.nlos_bias_mean.value_or(ch.nlos_default_bias);
          const double sigma = ob.nlos_noise_sigma.value_or(ch.nlos_noise_sigma);
          r += std::max(0.0, rng.normal(mean, sigma));
          break;  // first blocking obstacle supplies the bias
        }
      }

      if (rng.uniform() < ch.outlier_prob) r += ch.outlier_magnitude;
      rs.ranges[i] = std::max(r, 1e-6);
    }
    out.push_back(std::move(rs));
  }
  return out;
}

}  // namespace uwbnov
