#include "trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace uwbnov {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
  std::vector<double> cumlen;  // cumlen[i] = arc length up to points[i]
  double total = 0.0;
};

Polyline build_polyline(std::vector<Vec2> pts, bool closed) {
  Polyline p;
  p.points = std::move(pts);
  p.closed = closed;
  if (closed) p.points.push_back(p.points.front());
  p.cumlen.resize(p.points.size(), 0.0);
  for (std::size_t i = 1; i < p.points.size(); ++i) {
    const double dx = p.points[i].x - p.points[i - 1].x;
    const double dy = p.points[i].y - p.points[i - 1].y;
    p.cumlen[i] = p.cumlen[i - 1] + std::hypot(dx, dy);
  }
  p.total = p.cumlen.back();
  return p;
}

// Position and tangent heading at arc length s (clamped to [0, total]).
Pose2D at_arclength(const Polyline& p, double s) {
  if (s <= 0.0) s = 0.0;
  if (s >= p.total) s = p.total;
  std::size_t hi = 1;
  while (hi + 1 < p.points.size() && p.cumlen[hi] < s) ++hi;
  const double seg = p.cumlen[hi] - p.cumlen[hi - 1];
  const double f = seg > 0.0 ? (s - p.cumlen[hi - 1]) / seg : 0.0;
  const Vec2& a = p.points[hi - 1];
  const Vec2& b = p.points[hi];
  Pose2D out;
  out.x = a.x + f * (b.x - a.x);
  out.y = a.y + f * (b.y - a.y);
  if (seg > 0.0) out.heading = std::atan2(b.y - a.y, b.x - a.x);
  return out;
}

std::vector<Vec2> lemniscate_points(const TrajectorySpec& spec) {
  // Gerono figure-eight: x = cx + a sin u, y = cy + b sin u cos u
  constexpr int kSteps = 4096;
  std::vector<Vec2> pts;
  pts.reserve(kSteps);
  for (int i = 0; i < kSteps; ++i) {
    const double u = 2.0 * kPi * static_cast<double>(i) / kSteps;
    pts.push_back({spec.lemniscate_center.x + spec.lemniscate_radius_x * std::sin(u),
                   spec.lemniscate_center.y +
                       spec.lemniscate_radius_y * std::sin(u) * std::cos(u)});
  }
  return pts;
}

std::vector<Vec2> waypoint_points(const TrajectorySpec& spec) {
  if (spec.waypoint_count < 2) {
    throw ConfigError("random-waypoint trajectory needs at least 2 waypoints");
  }
  Rng rng(spec.rng_seed);
  const double m = spec.waypoint_margin;
  if (spec.arena.width() <= 2 * m || spec.arena.height() <= 2 * m) {
    throw ConfigError("waypoint margin leaves no room inside the arena");
  }
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(spec.waypoint_count));
  for (int i = 0; i < spec.waypoint_count; ++i) {
    pts.push_back({rng.uniform(spec.arena.xmin + m, spec.arena.xmax - m),
                   rng.uniform(spec.arena.ymin + m, spec.arena.ymax - m)});
  }
  return pts;
}

}  // namespace

const char* trajectory_kind_name(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::Line: return "line";
    case TrajectoryKind::Rectangle: return "rectangle";
    case TrajectoryKind::Lemniscate: return "lemniscate";
    case TrajectoryKind::RandomWaypoints: return "random_waypoints";
  }
  return "unknown";
}

TrajectoryKind trajectory_kind_from_name(const std::string& name) {
  if (name == "line") return TrajectoryKind::Line;
  if (name == "rectangle") return TrajectoryKind::Rectangle;
  if (name == "lemniscate") return TrajectoryKind::Lemniscate;
  if (name == "random_waypoints") return TrajectoryKind::RandomWaypoints;
  throw ConfigError("unknown trajectory kind '" + name + "'");
}

std::vector<TimedPose> generate_trajectory(const TrajectorySpec& spec) {
  if (!(spec.duration_s > 0.0) || !(spec.sample_rate_hz > 0.0) || !(spec.speed_cap_mps > 0.0)) {
    throw ConfigError("trajectory duration, sample rate and speed cap must be positive");
  }

  Polyline path;
  switch (spec.kind) {
    case TrajectoryKind::Line:
      path = build_polyline({spec.line_start, spec.line_end}, false);
      break;
    case TrajectoryKind::Rectangle:
      if (spec.rect_corners.size() < 3) {
        throw ConfigError("rectangle trajectory needs at least 3 corners");
      }
      path = build_polyline(spec.rect_corners, true);
      break;
    case TrajectoryKind::Lemniscate:
      path = build_polyline(lemniscate_points(spec), true);
      break;
    case TrajectoryKind::RandomWaypoints:
      path = build_polyline(waypoint_points(spec), false);
      break;
  }

  for (const Vec2& p : path.points) {
    if (!spec.arena.contains(p.x, p.y)) {
      throw ConfigError("trajectory path exits the arena at (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ")");
    }
  }
  if (path.total <= 0.0) {
    throw ConfigError("trajectory path has zero length");
  }

  // Constant traversal speed. Closed paths run an integer loop count so the
  // final pose lands back at the start whenever the cap allows at least one lap.
  double speed;
  double span;  // arc length coordinate wraps modulo path.total for loops
  if (path.closed) {
    const double laps = std::floor(spec.speed_cap_mps * spec.duration_s / path.total);
    speed = laps >= 1.0 ? laps * path.total / spec.duration_s : spec.speed_cap_mps;
    span = std::numeric_limits<double>::infinity();
  } else {
    speed = std::min(spec.speed_cap_mps, path.total / spec.duration_s);
    span = path.total;
  }

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
  std::vector<TimedPose> out;
  out.reserve(n);
  std::optional<double> last_heading;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate_hz;
    double s = speed * t;
    if (s > span) s = span;
    if (path.closed) s = std::fmod(s, path.total);
    TimedPose tp;
    tp.t = t;
    tp.pose = at_arclength(path, s);
    if (!tp.pose.heading && last_heading) tp.pose.heading = last_heading;
    last_heading = tp.pose.heading;
    out.push_back(tp);
  }
  return out;
}

}  // namespace uwbnov
