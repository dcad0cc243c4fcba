#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <uwbnov/uwbnov.h>

namespace {

// Exit codes: 0 success, 1 usage or config problem, 2 runtime or data problem.
int exit_code_for(uwbnov_status s) {
  switch (s) {
    case UWBNOV_OK:
      return 0;
    case UWBNOV_ERR_CONFIG:
      return 1;
    default:
      return 2;
  }
}

int finish(uwbnov_status s) {
  if (s != UWBNOV_OK) std::fprintf(stderr, "error: %s\n", uwbnov_last_error());
  return exit_code_for(s);
}

std::vector<const char*> pointers(const std::vector<std::string>& items) {
  std::vector<const char*> out;
  out.reserve(items.size());
  for (const auto& s : items) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated UWB localization with novelty-adaptive filtering"};
  app.set_version_flag("--version", uwbnov_version());
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_dir = "uwbnov-out";
  std::uint64_t seed = 0;
  bool force = false;
  app.add_option("--config", config_path, "Config file (JSON); defaults apply when omitted");
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--force", force, "Proceed past provenance fingerprint mismatches");

  auto* simulate = app.add_subcommand("simulate", "Generate a ranging dataset");
  std::string scenario_id;
  bool training = false;
  simulate->add_option("--scenario", scenario_id, "Scenario id to replay");
  simulate->add_flag("--training", training, "Generate the clean training batch instead");

  auto* train = app.add_subcommand("train", "Train the range novelty network");
  std::vector<std::string> dataset_paths;
  bool grid = false;
  train->add_option("datasets", dataset_paths, "Training dataset files")->required();
  train->add_flag("--grid", grid, "Run the width/batch/rate grid search first");

  auto* evaluate = app.add_subcommand("evaluate", "Run a filter over a dataset");
  std::string eval_dataset;
  std::string model_path;
  std::string mode = "adaptive-full";
  evaluate->add_option("--dataset", eval_dataset, "Dataset file to filter")->required();
  evaluate->add_option("--model", model_path, "Novelty model file (adaptive modes)");
  evaluate->add_option("--mode", mode, "static | adaptive-no-bias | adaptive-full");

  auto* ablate = app.add_subcommand("ablate", "Sweep scenarios, layouts and filter modes");
  (void)ablate;

  auto* report = app.add_subcommand("report", "Merge evaluation runs into one table");
  std::vector<std::string> run_dirs;
  report->add_option("runs", run_dirs, "Evaluation output directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const char* cfg = config_path.empty() ? nullptr : config_path.c_str();
  const int has_seed = app.count("--seed") > 0 ? 1 : 0;

  if (simulate->parsed()) {
    return finish(uwbnov_cmd_simulate(cfg, has_seed, seed,
                                      scenario_id.empty() ? nullptr : scenario_id.c_str(),
                                      training ? 1 : 0, out_dir.c_str()));
  }
  if (train->parsed()) {
    const auto ptrs = pointers(dataset_paths);
    return finish(uwbnov_cmd_train(cfg, has_seed, seed, ptrs.data(), ptrs.size(),
                                   grid ? 1 : 0, out_dir.c_str()));
  }
  if (evaluate->parsed()) {
    return finish(uwbnov_cmd_evaluate(cfg, has_seed, seed, eval_dataset.c_str(),
                                      model_path.empty() ? nullptr : model_path.c_str(),
                                      mode.c_str(), out_dir.c_str(), force ? 1 : 0));
  }
  if (ablate->parsed()) {
    return finish(uwbnov_cmd_ablate(cfg, has_seed, seed, out_dir.c_str()));
  }
  if (report->parsed()) {
    const auto ptrs = pointers(run_dirs);
    return finish(uwbnov_cmd_report(cfg, has_seed, seed, ptrs.data(), ptrs.size(),
                                    out_dir.c_str()));
  }
  return 1;
}
