#include "config.hpp"

#include <fstream>

#include "dataset_io.hpp"
#include "errors.hpp"
#include "hash.hpp"

namespace uwbnov {
namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const char* section) {
  if (!j.is_object()) {
    throw ConfigError(std::string("config section '") + section + "' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string("unknown key '") + key + "' in config section '" +
                        section + "'");
    }
  }
}

template <typename T>
T fetch(const nlohmann::json& j, const char* key, T fallback, const char* section) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + section + "." + key +
                      "' has the wrong type");
  }
}

}  // namespace

void HarnessConfig::validate() const {
  if (!(arena.width() > 0.0) || !(arena.height() > 0.0)) {
    throw ConfigError("arena must have positive extent");
  }
  if (layout_variant != "hex6" && layout_variant != "hex5" && layout_variant != "hex4" &&
      layout_variant != "custom") {
    throw ConfigError("layout variant must be hex6, hex5, hex4 or custom");
  }
  if ((layout_variant == "custom") != custom_layout.has_value()) {
    throw ConfigError("a custom layout requires variant \"custom\" and explicit anchors");
  }
  if (!(channel.los_noise_sigma >= 0.0) || !(channel.nlos_noise_sigma >= 0.0) ||
      !(channel.los_bias_mean >= 0.0) || !(channel.nlos_default_bias >= 0.0) ||
      !(channel.outlier_magnitude >= 0.0) || !(channel.outlier_prob >= 0.0) ||
      channel.outlier_prob >= 1.0) {
    throw ConfigError("channel parameters out of range");
  }
  cmap.validate();
  bmap.validate();
  if (!(ekf.static_sigma2 > 0.0)) throw ConfigError("ekf.static_sigma2 must be positive");
  if (!(ekf.staleness_cap_s >= 0.0)) throw ConfigError("ekf.staleness_cap_s must be >= 0");
  if (!(ekf.noise.q_pos >= 0.0) || !(ekf.noise.q_vel >= 0.0) ||
      !(ekf.noise.q_pos + ekf.noise.q_vel > 0.0)) {
    throw ConfigError("process noise must be non-negative and not identically zero");
  }
  if (train.hidden_e1 < 1 || train.hidden_e2 < 1 || train.hidden_d1 < 1) {
    throw ConfigError("train.hidden widths must be positive");
  }
  if (train.epochs < 1 || train.batch_size < 1 || !(train.learning_rate > 0.0)) {
    throw ConfigError("train optimizer settings out of range");
  }
  if (train.trajectories < 1 || !(train.duration_s > 0.0) || !(train.sample_rate_hz > 0.0)) {
    throw ConfigError("train capture settings out of range");
  }
  if (eval.heatmap_nx < 1 || eval.heatmap_ny < 1) {
    throw ConfigError("eval heatmap grid must have at least one cell per axis");
  }
  if (ablate.seeds < 1) throw ConfigError("ablate.seeds must be at least 1");
}

HarnessConfig default_config() {
  HarnessConfig cfg;
  // Simulator calibration: a small constant ranging offset keeps the bias map
  // honest on clear-channel data, matching real hardware behavior.
  cfg.channel.los_bias_mean = 0.125;
  return cfg;
}

HarnessConfig config_from_json(const nlohmann::json& j) {
  check_keys(j, {"seed", "arena", "layout", "channel", "maps", "ekf", "train", "eval",
                 "ablate"},
             "<root>");
  HarnessConfig cfg = default_config();
  cfg.seed = fetch<std::uint64_t>(j, "seed", cfg.seed, "<root>");

  if (j.contains("arena")) {
    const auto& a = j["arena"];
    check_keys(a, {"xmin", "ymin", "xmax", "ymax"}, "arena");
    cfg.arena.xmin = fetch(a, "xmin", cfg.arena.xmin, "arena");
    cfg.arena.ymin = fetch(a, "ymin", cfg.arena.ymin, "arena");
    cfg.arena.xmax = fetch(a, "xmax", cfg.arena.xmax, "arena");
    cfg.arena.ymax = fetch(a, "ymax", cfg.arena.ymax, "arena");
  }

  if (j.contains("layout")) {
    const auto& l = j["layout"];
    check_keys(l, {"variant", "tag_height", "anchors"}, "layout");
    cfg.layout_variant = fetch<std::string>(l, "variant", cfg.layout_variant, "layout");
    if (cfg.layout_variant == "custom") {
      if (!l.contains("anchors") || !l.contains("tag_height")) {
        throw ConfigError("layout variant \"custom\" needs anchors and tag_height");
      }
      cfg.custom_layout = layout_from_json(l);
    } else if (l.contains("anchors") || l.contains("tag_height")) {
      throw ConfigError("explicit anchors require layout variant \"custom\"");
    }
  }

  if (j.contains("channel")) {
    const auto& c = j["channel"];
    check_keys(c,
               {"los_noise_sigma", "los_bias_mean", "nlos_default_bias", "nlos_noise_sigma",
                "outlier_prob", "outlier_magnitude"},
               "channel");
    cfg.channel.los_noise_sigma =
        fetch(c, "los_noise_sigma", cfg.channel.los_noise_sigma, "channel");
    cfg.channel.los_bias_mean = fetch(c, "los_bias_mean", cfg.channel.los_bias_mean, "channel");
    cfg.channel.nlos_default_bias =
        fetch(c, "nlos_default_bias", cfg.channel.nlos_default_bias, "channel");
    cfg.channel.nlos_noise_sigma =
        fetch(c, "nlos_noise_sigma", cfg.channel.nlos_noise_sigma, "channel");
    cfg.channel.outlier_prob = fetch(c, "outlier_prob", cfg.channel.outlier_prob, "channel");
    cfg.channel.outlier_magnitude =
        fetch(c, "outlier_magnitude", cfg.channel.outlier_magnitude, "channel");
  }

  if (j.contains("maps")) {
    const auto& m = j["maps"];
    check_keys(m, {"covariance", "bias"}, "maps");
    if (m.contains("covariance")) {
      const auto& cm = m["covariance"];
      check_keys(cm, {"sigma2_min", "sigma2_max", "e_lo", "e_hi"}, "maps.covariance");
      cfg.cmap.sigma2_min = fetch(cm, "sigma2_min", cfg.cmap.sigma2_min, "maps.covariance");
      cfg.cmap.sigma2_max = fetch(cm, "sigma2_max", cfg.cmap.sigma2_max, "maps.covariance");
      cfg.cmap.e_lo = fetch(cm, "e_lo", cfg.cmap.e_lo, "maps.covariance");
      cfg.cmap.e_hi = fetch(cm, "e_hi", cfg.cmap.e_hi, "maps.covariance");
    }
    if (m.contains("bias")) {
      const auto& bm = m["bias"];
      check_keys(bm, {"m", "q", "b_max"}, "maps.bias");
      cfg.bmap.m = fetch(bm, "m", cfg.bmap.m, "maps.bias");
      cfg.bmap.q = fetch(bm, "q", cfg.bmap.q, "maps.bias");
      cfg.bmap.b_max = fetch(bm, "b_max", cfg.bmap.b_max, "maps.bias");
    }
  }

  if (j.contains("ekf")) {
    const auto& e = j["ekf"];
    check_keys(e, {"q_pos", "q_vel", "static_sigma2", "staleness_cap_s"}, "ekf");
    cfg.ekf.noise.q_pos = fetch(e, "q_pos", cfg.ekf.noise.q_pos, "ekf");
    cfg.ekf.noise.q_vel = fetch(e, "q_vel", cfg.ekf.noise.q_vel, "ekf");
    cfg.ekf.static_sigma2 = fetch(e, "static_sigma2", cfg.ekf.static_sigma2, "ekf");
    cfg.ekf.staleness_cap_s = fetch(e, "staleness_cap_s", cfg.ekf.staleness_cap_s, "ekf");
  }

  if (j.contains("train")) {
    const auto& t = j["train"];
    check_keys(t,
               {"hidden", "epochs", "batch_size", "learning_rate", "trajectories",
                "duration_s", "sample_rate_hz"},
               "train");
    if (t.contains("hidden")) {
      const auto& h = t["hidden"];
      if (!h.is_array() || h.size() != 3) {
        throw ConfigError("train.hidden must be [e1, e2, d1]");
      }
      cfg.train.hidden_e1 = h[0].get<int>();
      cfg.train.hidden_e2 = h[1].get<int>();
      cfg.train.hidden_d1 = h[2].get<int>();
    }
    cfg.train.epochs = fetch(t, "epochs", cfg.train.epochs, "train");
    cfg.train.batch_size = fetch(t, "batch_size", cfg.train.batch_size, "train");
    cfg.train.learning_rate = fetch(t, "learning_rate", cfg.train.learning_rate, "train");
    cfg.train.trajectories = fetch(t, "trajectories", cfg.train.trajectories, "train");
    cfg.train.duration_s = fetch(t, "duration_s", cfg.train.duration_s, "train");
    cfg.train.sample_rate_hz = fetch(t, "sample_rate_hz", cfg.train.sample_rate_hz, "train");
  }

  if (j.contains("eval")) {
    const auto& e = j["eval"];
    check_keys(e, {"heatmap_nx", "heatmap_ny"}, "eval");
    cfg.eval.heatmap_nx = fetch(e, "heatmap_nx", cfg.eval.heatmap_nx, "eval");
    cfg.eval.heatmap_ny = fetch(e, "heatmap_ny", cfg.eval.heatmap_ny, "eval");
  }

  if (j.contains("ablate")) {
    const auto& a = j["ablate"];
    check_keys(a, {"seeds", "scenarios", "layout_variants"}, "ablate");
    cfg.ablate.seeds = fetch(a, "seeds", cfg.ablate.seeds, "ablate");
    cfg.ablate.scenarios =
        fetch(a, "scenarios", cfg.ablate.scenarios, "ablate");
    cfg.ablate.layout_variants =
        fetch(a, "layout_variants", cfg.ablate.layout_variants, "ablate");
  }

  cfg.validate();
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": bad JSON: " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const HarnessConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["arena"] = {{"xmin", cfg.arena.xmin},
                {"ymin", cfg.arena.ymin},
                {"xmax", cfg.arena.xmax},
                {"ymax", cfg.arena.ymax}};
  if (cfg.custom_layout) {
    nlohmann::json l = layout_to_json(*cfg.custom_layout);
    l["variant"] = cfg.layout_variant;
    j["layout"] = l;
  } else {
    j["layout"] = {{"variant", cfg.layout_variant}};
  }
  j["channel"] = {{"los_noise_sigma", cfg.channel.los_noise_sigma},
                  {"los_bias_mean", cfg.channel.los_bias_mean},
                  {"nlos_default_bias", cfg.channel.nlos_default_bias},
                  {"nlos_noise_sigma", cfg.channel.nlos_noise_sigma},
                  {"outlier_prob", cfg.channel.outlier_prob},
                  {"outlier_magnitude", cfg.channel.outlier_magnitude}};
  j["maps"] = {{"covariance",
                {{"sigma2_min", cfg.cmap.sigma2_min},
                 {"sigma2_max", cfg.cmap.sigma2_max},
                 {"e_lo", cfg.cmap.e_lo},
                 {"e_hi", cfg.cmap.e_hi}}},
               {"bias", {{"m", cfg.bmap.m}, {"q", cfg.bmap.q}, {"b_max", cfg.bmap.b_max}}}};
  j["ekf"] = {{"q_pos", cfg.ekf.noise.q_pos},
              {"q_vel", cfg.ekf.noise.q_vel},
              {"static_sigma2", cfg.ekf.static_sigma2},
              {"staleness_cap_s", cfg.ekf.staleness_cap_s}};
  j["train"] = {{"hidden", {cfg.train.hidden_e1, cfg.train.hidden_e2, cfg.train.hidden_d1}},
                {"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"learning_rate", cfg.train.learning_rate},
                {"trajectories", cfg.train.trajectories},
                {"duration_s", cfg.train.duration_s},
                {"sample_rate_hz", cfg.train.sample_rate_hz}};
  j["eval"] = {{"heatmap_nx", cfg.eval.heatmap_nx}, {"heatmap_ny", cfg.eval.heatmap_ny}};
  j["ablate"] = {{"seeds", cfg.ablate.seeds},
                 {"scenarios", cfg.ablate.scenarios},
                 {"layout_variants", cfg.ablate.layout_variants}};
  return j;
}

std::string config_fingerprint(const HarnessConfig& cfg) {
  return fnv1a_hex(config_to_json(cfg).dump());
}

}  // namespace uwbnov
