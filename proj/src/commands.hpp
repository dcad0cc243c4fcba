#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "metrics.hpp"

namespace uwbnov {

// Experiment orchestration behind the CLI verbs. Every file these commands
// write starts from the same provenance blob (command name, canonical config,
// config fingerprint, seed, input fingerprints), so any output can be
// regenerated byte-identically from its own header.

struct SimulateOutcome {
  std::vector<std::string> files;
};

// One built-in scenario id -> scenario-<id>.dataset, or (training = true) the
// nominal clear-channel training batch -> train-00.dataset ... Exactly one of
// the two selectors must be given.
SimulateOutcome cmd_simulate(const HarnessConfig& cfg, const std::string& scenario_id,
                             bool training, const std::string& out_dir);

struct TrainOutcome {
  std::string model_file;
  std::string leaderboard_file;  // written only when the grid runs
  double final_loss = 0.0;
  int samples = 0;
  int grid_entries = 0;
  int grid_rejected = 0;
};

// Trains the novelty network on the union of the given datasets (all must
// share one anchor layout) and writes model.json. grid = true instead ranks
// the full hyperparameter grid, writes the leaderboard, and trains the final
// model with the winning combination.
TrainOutcome cmd_train(const HarnessConfig& cfg, const std::vector<std::string>& dataset_paths,
                       bool grid, const std::string& out_dir);

struct EvaluateOutcome {
  std::string trace_file;
  std::string metrics_json;  // empty when the dataset carries no ground truth
  std::string metrics_text;  //   "
  std::string cdf_file;      //   "
  std::string pdf_file;      //   "
  std::string heatmap_file;  // empty in static mode, which has no novelty scores
  std::optional<MetricsReport> metrics;
  int samples = 0;
};

// Replays one dataset through a filter mode: "static", "adaptive-no-bias" or
// "adaptive-full". Adaptive modes require a model whose layout fingerprint
// matches the dataset layout; force runs past a fingerprint mismatch but
// never past an input-width mismatch. Static mode ignores the model argument
// entirely, so its outputs are identical with or without one.
EvaluateOutcome cmd_evaluate(const HarnessConfig& cfg, const std::string& dataset_path,
                             const std::string& model_path, const std::string& mode,
                             const std::string& out_dir, bool force = false);

struct AblateCell {
  std::string variant;
  std::string scenario;
  std::string mode;
  bool nlos = false;
  double mean_rmse_tot_cm = 0.0;
  std::vector<double> per_seed_rmse_tot_cm;
};

struct AblateOutcome {
  std::string table_file;
  std::string json_file;
  std::vector<AblateCell> cells;  // variant-major, then scenario, then mode
  int filter_runs = 0;
};

// Full sweep: {layout variants} x {scenarios} x {static, adaptive-no-bias,
// adaptive-full}, each cell averaged over ablate.seeds consecutive seeds.
// One model is trained per (seed, variant) and shared by that seed's runs,
// mirroring how a single trained network serves a deployment.
AblateOutcome cmd_ablate(const HarnessConfig& cfg, const std::string& out_dir);

struct ReportOutcome {
  std::string table_file;
  std::string json_file;
  std::optional<double> average_improvement_pct;  // adaptive-full vs static
};

// Merges evaluate run directories into one side-by-side table keyed by
// scenario, with per-scenario improvement percentages against the static
// baseline: (static - adaptive) / static * 100.
ReportOutcome cmd_report(const HarnessConfig& cfg, const std::vector<std::string>& run_dirs,
                         const std::string& out_dir);

}  // namespace uwbnov
