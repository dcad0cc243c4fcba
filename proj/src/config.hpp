#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "autoencoder.hpp"
#include "ekf.hpp"
#include "geometry.hpp"
#include "mapping.hpp"
#include "simulator.hpp"
#include "trajectory.hpp"

namespace uwbnov {

struct EkfSettings {
  ProcessNoise noise;
  double static_sigma2 = 0.01;
  double staleness_cap_s = 0.5;
};

struct TrainSettings {
  int hidden_e1 = 15;
  int hidden_e2 = 30;
  int hidden_d1 = 15;
  int epochs = 10;
  int batch_size = 32;
  double learning_rate = 0.001;
  int trajectories = 10;
  double duration_s = 50.0;
  double sample_rate_hz = 20.0;
};

struct EvalSettings {
  int heatmap_nx = 4;
  int heatmap_ny = 4;
};

struct AblateSettings {
  int seeds = 10;
  std::vector<std::string> scenarios;        // empty means all built-ins
  std::vector<std::string> layout_variants;  // empty means hex6, hex5, hex4
};

// One parsed configuration drives every command. The hash covers the full
// canonical serialization (effective seed included) and is embedded in every
// output file so a run can always be traced back to its exact inputs.
struct HarnessConfig {
  std::uint64_t seed = 1;
  Arena arena;
  std::string layout_variant = "hex6";         // hex6 | hex5 | hex4 | custom
  std::optional<AnchorLayout> custom_layout;   // required iff variant == custom
  ChannelModel channel;                        // simulator base channel
  CovarianceMap cmap;
  BiasMap bmap;
  EkfSettings ekf;
  TrainSettings train;
  EvalSettings eval;
  AblateSettings ablate;

  void validate() const;
};

HarnessConfig default_config();
HarnessConfig config_from_json(const nlohmann::json& j);  // unknown keys are errors
HarnessConfig load_config(const std::string& path);
nlohmann::json config_to_json(const HarnessConfig& cfg);  // canonical full form
std::string config_fingerprint(const HarnessConfig& cfg);

}  // namespace uwbnov
