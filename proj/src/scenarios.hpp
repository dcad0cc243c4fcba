#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"
#include "simulator.hpp"
#include "trajectory.hpp"

namespace uwbnov {

// Reference deployment: six ceiling anchors around the room, hexagon order
// (left, top-left, top-right, right, bottom-right, bottom-left). The reduced
// variants drop the side anchors, hex5 the right one and hex4 both, leaving
// the square used by the anchor-count study. Anchor positions are expressed
// as fractions of the reference 6 m x 3 m room and rescale with the arena.
AnchorLayout builtin_layout(const std::string& variant, const Arena& arena);
const std::vector<std::string>& builtin_layout_variants();

// The active layout for a config: one of the builtin variants or the
// explicitly supplied custom one.
AnchorLayout layout_for(const HarnessConfig& cfg);

struct ScenarioInfo {
  std::string id;
  const char* trajectory;  // line | rectangle | lemniscate | random
  const char* nlos_level;  // low | medium | high
};
const std::vector<ScenarioInfo>& builtin_scenario_infos();
std::vector<std::string> builtin_scenario_ids();
bool scenario_is_nlos(const std::string& id);  // true for medium and high

// One of the nine built-in test worlds, assembled against the given layout
// and channel. Obstacle positions are tied to the room (same physical world
// whichever layout variant is active). Per-scenario RNG streams are derived
// from the base seed, so distinct scenarios never share noise.
ScenarioSpec builtin_scenario(const std::string& id, const AnchorLayout& layout,
                              const Arena& arena, const ChannelModel& base_channel,
                              std::uint64_t seed);

// Training captures: independent random-waypoint walks over the clear
// channel, one spec per trajectory, each with its own derived seed pair.
std::vector<ScenarioSpec> training_scenarios(const AnchorLayout& layout, const Arena& arena,
                                             const ChannelModel& base_channel,
                                             const TrainSettings& train, std::uint64_t seed);

}  // namespace uwbnov
