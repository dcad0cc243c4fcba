#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "rng.hpp"

namespace uwbnov {
namespace {

constexpr double kRefW = 6.0;
constexpr double kRefH = 3.0;
constexpr double kAnchorZ = 2.0;
constexpr double kTagHeight = 0.3;

// Reference room coordinates, hexagon order.
constexpr double kHex[6][2] = {{0.0, 1.5}, {1.5, 3.0}, {4.5, 3.0},
                               {6.0, 1.5}, {4.5, 0.0}, {1.5, 0.0}};

Vec2 map_pt(const Arena& a, double x, double y) {
  return {a.xmin + x * a.width() / kRefW, a.ymin + y * a.height() / kRefH};
}

// Metric lengths (plate size, standoff) follow the tighter axis so the world
// keeps its proportions in non-default arenas; the reference room maps 1:1.
double map_scale(const Arena& a) {
  return std::min(a.width() / kRefW, a.height() / kRefH);
}

// A flat blocker a short standoff in front of an anchor position, facing the
// room center. Wide enough to shadow the anchor from most of the arena while
// leaving grazing sightlines clear.
Obstacle plate_in_front(const Arena& arena, int hex_index, double t_start, double t_end) {
  const double s = map_scale(arena);
  const Vec2 at = map_pt(arena, kHex[hex_index][0], kHex[hex_index][1]);
  const Vec2 center = map_pt(arena, kRefW / 2, kRefH / 2);
  double dx = center.x - at.x;
  double dy = center.y - at.y;
  const double n = std::hypot(dx, dy);
  dx /= n;
  dy /= n;
  const Vec2 mid{at.x + 0.3 * s * dx, at.y + 0.3 * s * dy};
  const Vec2 half{-dy * 0.5 * s, dx * 0.5 * s};
  Obstacle plate;
  plate.footprint = Segment2D{{mid.x - half.x, mid.y - half.y}, {mid.x + half.x, mid.y + half.y}};
  plate.t_start = t_start;
  plate.t_end = t_end;
  return plate;
}

// Free-standing cabinet on the left side of the room. Shadows the left
// anchor from the upper band and the top-left anchor from the lower-left
// corner; the right half of the room keeps line of sight everywhere.
Obstacle side_cabinet(const Arena& arena) {
  const Vec2 lo = map_pt(arena, 0.7, 1.6);
  const Vec2 hi = map_pt(arena, 1.1, 2.4);
  Obstacle cab;
  cab.footprint = RectFootprint{lo.x, lo.y, hi.x, hi.y};
  return cab;
}

TrajectorySpec base_trajectory(const Arena& arena) {
  TrajectorySpec tr;
  tr.arena = arena;
  tr.duration_s = 50.0;
  tr.sample_rate_hz = 10.0;
  tr.speed_cap_mps = 1.0;
  return tr;
}

TrajectorySpec line_walk(const Arena& arena) {
  TrajectorySpec tr = base_trajectory(arena);
  tr.kind = TrajectoryKind::Line;
  tr.line_start = map_pt(arena, 0.5, 1.5);
  tr.line_end = map_pt(arena, 5.5, 1.5);
  return tr;
}

TrajectorySpec rectangle_loop(const Arena& arena) {
  TrajectorySpec tr = base_trajectory(arena);
  tr.kind = TrajectoryKind::Rectangle;
  tr.rect_corners = {map_pt(arena, 1.0, 0.5), map_pt(arena, 5.0, 0.5),
                     map_pt(arena, 5.0, 2.5), map_pt(arena, 1.0, 2.5)};
  return tr;
}

TrajectorySpec figure_eight(const Arena& arena) {
  TrajectorySpec tr = base_trajectory(arena);
  tr.kind = TrajectoryKind::Lemniscate;
  tr.lemniscate_center = map_pt(arena, kRefW / 2, kRefH / 2);
  tr.lemniscate_radius_x = 2.2 * arena.width() / kRefW;
  tr.lemniscate_radius_y = 1.2 * arena.height() / kRefH;
  return tr;
}

TrajectorySpec random_walk(const Arena& arena, double duration_s) {
  TrajectorySpec tr = base_trajectory(arena);
  tr.kind = TrajectoryKind::RandomWaypoints;
  tr.duration_s = duration_s;
  return tr;
}

}  // namespace

AnchorLayout builtin_layout(const std::string& variant, const Arena& arena) {
  std::vector<int> keep;
  if (variant == "hex6") {
    keep = {0, 1, 2, 3, 4, 5};
  } else if (variant == "hex5") {
    keep = {0, 1, 2, 4, 5};
  } else if (variant == "hex4") {
    keep = {1, 2, 4, 5};
  } else {
    throw ConfigError("unknown layout variant '" + variant + "'");
  }
  std::vector<Anchor> anchors;
  anchors.reserve(keep.size());
  for (int i : keep) {
    const Vec2 p = map_pt(arena, kHex[i][0], kHex[i][1]);
    anchors.push_back({i, p.x, p.y, kAnchorZ});
  }
  return AnchorLayout(std::move(anchors), kTagHeight);
}

const std::vector<std::string>& builtin_layout_variants() {
  static const std::vector<std::string> variants = {"hex6", "hex5", "hex4"};
  return variants;
}

AnchorLayout layout_for(const HarnessConfig& cfg) {
  if (cfg.layout_variant == "custom") {
    if (!cfg.custom_layout) throw ConfigError("custom layout variant without anchors");
    return *cfg.custom_layout;
  }
  return builtin_layout(cfg.layout_variant, cfg.arena);
}

const std::vector<ScenarioInfo>& builtin_scenario_infos() {
  static const std::vector<ScenarioInfo> infos = {
      {"1", "line", "low"},       {"2", "rectangle", "low"},  {"3", "lemniscate", "low"},
      {"4", "random", "high"},    {"5", "rectangle", "medium"},
      {"6", "lemniscate", "medium"}, {"7", "rectangle", "medium"},
      {"8", "lemniscate", "medium"}, {"9", "lemniscate", "high"},
  };
  return infos;
}

std::vector<std::string> builtin_scenario_ids() {
  std::vector<std::string> ids;
  for (const ScenarioInfo& info : builtin_scenario_infos()) ids.push_back(info.id);
  return ids;
}

bool scenario_is_nlos(const std::string& id) {
  for (const ScenarioInfo& info : builtin_scenario_infos()) {
    if (info.id == id) return std::string(info.nlos_level) != "low";
  }
  throw ConfigError("unknown scenario id '" + id + "'");
}

ScenarioSpec builtin_scenario(const std::string& id, const AnchorLayout& layout,
                              const Arena& arena, const ChannelModel& base_channel,
                              std::uint64_t seed) {
  int idx = 0;
  if (id.size() == 1 && id[0] >= '1' && id[0] <= '9') idx = id[0] - '0';
  if (idx == 0) throw ConfigError("unknown scenario id '" + id + "'");

  ScenarioSpec spec;
  spec.id = id;
  spec.layout = layout;
  spec.channel = base_channel;
  spec.channel.rng_seed = derive_seed(seed, 100 + idx);

  switch (idx) {
    case 1:
      spec.trajectory = line_walk(arena);
      break;
    case 2:
      spec.trajectory = rectangle_loop(arena);
      break;
    case 3:
      spec.trajectory = figure_eight(arena);
      break;
    case 4:
      spec.trajectory = random_walk(arena, 80.0);
      spec.obstacles.push_back(side_cabinet(arena));
      break;
    case 5:
      spec.trajectory = rectangle_loop(arena);
      spec.obstacles.push_back(plate_in_front(arena, 1, 15.0, 35.0));
      break;
    case 6:
      spec.trajectory = figure_eight(arena);
      spec.obstacles.push_back(plate_in_front(arena, 2, 15.0, 35.0));
      break;
    case 7:
      spec.trajectory = rectangle_loop(arena);
      spec.obstacles.push_back(plate_in_front(arena, 4, 15.0, 35.0));
      break;
    case 8:
      spec.trajectory = figure_eight(arena);
      spec.obstacles.push_back(plate_in_front(arena, 5, 15.0, 35.0));
      break;
    case 9:
      spec.trajectory = figure_eight(arena);
      spec.obstacles.push_back(
          plate_in_front(arena, 1, 0.0, std::numeric_limits<double>::infinity()));
      spec.obstacles.push_back(
          plate_in_front(arena, 4, 20.0, std::numeric_limits<double>::infinity()));
      break;
  }
  spec.trajectory.rng_seed = derive_seed(seed, 200 + idx);
  return spec;
}

std::vector<ScenarioSpec> training_scenarios(const AnchorLayout& layout, const Arena& arena,
                                             const ChannelModel& base_channel,
                                             const TrainSettings& train, std::uint64_t seed) {
  std::vector<ScenarioSpec> specs;
  specs.reserve(train.trajectories);
  for (int k = 0; k < train.trajectories; ++k) {
    ScenarioSpec spec;
    spec.id = "train-" + std::to_string(k);
    spec.layout = layout;
    spec.channel = base_channel;
    spec.channel.rng_seed = derive_seed(seed, 400 + k);
    spec.trajectory = random_walk(arena, train.duration_s);
    spec.trajectory.sample_rate_hz = train.sample_rate_hz;
    spec.trajectory.rng_seed = derive_seed(seed, 300 + k);
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace uwbnov
