#pragma once

#include <cstdint>
#include <vector>

#include "geometry.hpp"

namespace uwbnov {

struct Arena {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 6.0;
  double ymax = 3.0;

  bool contains(double x, double y, double tol = 1e-9) const {
    return x >= xmin - tol && x <= xmax + tol && y >= ymin - tol && y <= ymax + tol;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

enum class TrajectoryKind { Line, Rectangle, Lemniscate, RandomWaypoints };

const char* trajectory_kind_name(TrajectoryKind kind);
TrajectoryKind trajectory_kind_from_name(const std::string& name);

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::RandomWaypoints;
  double duration_s = 50.0;
  double sample_rate_hz = 10.0;
  double speed_cap_mps = 1.0;
  Arena arena;

  // Line
  Vec2 line_start{0.5, 1.5};
  Vec2 line_end{5.5, 1.5};
  // Rectangle: corner loop, traversed in list order and closed back to corner 0
  std::vector<Vec2> rect_corners{{1.0, 0.5}, {5.0, 0.5}, {5.0, 2.5}, {1.0, 2.5}};
  // Lemniscate (figure-eight), Gerono parametrisation around a center
  Vec2 lemniscate_center{3.0, 1.5};
  double lemniscate_radius_x = 2.2;
  double lemniscate_radius_y = 1.2;
  // RandomWaypoints
  int waypoint_count = 12;
  double waypoint_margin = 0.3;  // keep-out border inside the arena

  std::uint64_t rng_seed = 0;
};

struct TimedPose {
  double t = 0.0;
  Pose2D pose;
};

// Constant-speed walk along the spec's path, sampled at sample_rate_hz for
// duration_s. Speed is the largest value <= speed_cap_mps that finishes the
// open path (or an integer number of loops for closed paths) in exactly
// duration_s; if even the cap is too slow the robot just covers what it can.
// Throws ConfigError when the path leaves the arena or the spec is invalid.
std::vector<TimedPose> generate_trajectory(const TrajectorySpec& spec);

}  // namespace uwbnov
