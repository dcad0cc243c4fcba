#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "autoencoder.hpp"
#include "dataset_io.hpp"
#include "ekf.hpp"
#include "errors.hpp"
#include "hash.hpp"
#include "rng.hpp"
#include "scenarios.hpp"
#include "simulator.hpp"

namespace uwbnov {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

template <typename... Args>
void appendf(std::string& s, const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  s += buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from " + path + " failed");
  return ss.str();
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

std::string base_name(const std::string& path) {
  std::string p = path;
  while (p.size() > 1 && p.back() == '/') p.pop_back();
  return fs::path(p).filename().string();
}

// Common header blob: enough to re-run the command and get the same bytes.
// File basenames only; absolute paths would make reruns location-dependent.
json provenance_base(const HarnessConfig& cfg, const char* command) {
  json p;
  p["command"] = command;
  p["config"] = config_to_json(cfg);
  p["config_fingerprint"] = config_fingerprint(cfg);
  p["seed"] = cfg.seed;
  p["inputs"] = json::array();
  return p;
}

json input_entry(const std::string& label, const std::string& bytes) {
  return json{{"file", label}, {"fingerprint", fnv1a_hex(bytes)}};
}

enum class FilterMode { Static, NoBias, Full };

FilterMode parse_mode(const std::string& s) {
  if (s == "static") return FilterMode::Static;
  if (s == "adaptive-no-bias") return FilterMode::NoBias;
  if (s == "adaptive-full") return FilterMode::Full;
  throw ConfigError("unknown filter mode '" + s +
                    "' (expected static, adaptive-no-bias or adaptive-full)");
}

TrainConfig train_config_for(const HarnessConfig& cfg, std::uint64_t seed) {
  TrainConfig tc;
  tc.epochs = cfg.train.epochs;
  tc.batch_size = cfg.train.batch_size;
  tc.learning_rate = cfg.train.learning_rate;
  tc.rng_seed = derive_seed(seed, 500);
  return tc;
}

NetworkShape shape_for(const HarnessConfig& cfg, const AnchorLayout& layout) {
  NetworkShape shape;
  shape.n_in = static_cast<int>(layout.size());
  shape.n_e1 = cfg.train.hidden_e1;
  shape.n_e2 = cfg.train.hidden_e2;
  shape.n_d1 = cfg.train.hidden_d1;
  return shape;
}

// Novelty per sample under the same hold-last imputation the filter applies:
// the latest finite reading per anchor, zero until one has been seen.
std::vector<NoveltyVector> score_series(const AutoencoderModel& model,
                                        const std::vector<RangeSample>& samples) {
  std::vector<NoveltyVector> out;
  out.reserve(samples.size());
  if (samples.empty()) return out;
  const std::size_t n = samples.front().ranges.size();
  std::vector<double> held(n, 0.0);
  std::vector<double> imputed(n, 0.0);
  for (const RangeSample& s : samples) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isfinite(s.ranges[i])) held[i] = s.ranges[i];
      imputed[i] = held[i];
    }
    out.push_back(novelty_score(model, imputed));
  }
  return out;
}

std::vector<Pose2D> estimate_poses(const std::vector<FilterState>& trace) {
  std::vector<Pose2D> est;
  est.reserve(trace.size());
  for (const FilterState& s : trace) est.push_back(Pose2D{s.mean(0), s.mean(1), {}});
  return est;
}

double trace_rmse_tot_cm(const std::vector<FilterState>& trace,
                         const std::vector<RangeSample>& samples) {
  std::vector<Pose2D> truth;
  truth.reserve(samples.size());
  for (const RangeSample& s : samples) truth.push_back(*s.truth);
  return compute_metrics(error_series(estimate_poses(trace), truth)).rmse_tot_cm;
}

DatasetFile dataset_from_spec(const ScenarioSpec& spec, const json& provenance) {
  DatasetFile file;
  file.layout = spec.layout;
  file.samples = simulate_ranges(spec);
  file.has_truth = true;
  file.meta["provenance"] = provenance;
  file.meta["scenario"] = spec.id;
  file.meta["channel_seed"] = spec.channel.rng_seed;
  file.meta["trajectory_seed"] = spec.trajectory.rng_seed;
  return file;
}

const ScenarioInfo& scenario_info(const std::string& id) {
  for (const ScenarioInfo& info : builtin_scenario_infos()) {
    if (info.id == id) return info;
  }
  throw ConfigError("unknown scenario id '" + id + "'");
}

}  // namespace

SimulateOutcome cmd_simulate(const HarnessConfig& cfg, const std::string& scenario_id,
                             bool training, const std::string& out_dir) {
  if (training && !scenario_id.empty()) {
    throw ConfigError("simulate takes a scenario id or the training selector, not both");
  }
  if (!training && scenario_id.empty()) {
    throw ConfigError("simulate needs a scenario id or the training selector");
  }
  ensure_dir(out_dir);
  const AnchorLayout layout = layout_for(cfg);
  const json provenance = provenance_base(cfg, "simulate");

  SimulateOutcome out;
  if (training) {
    const std::vector<ScenarioSpec> specs =
        training_scenarios(layout, cfg.arena, cfg.channel, cfg.train, cfg.seed);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "train-%02zu.dataset", k);
      const std::string path = join_path(out_dir, name);
      save_dataset(dataset_from_spec(specs[k], provenance), path);
      out.files.push_back(path);
    }
  } else {
    const ScenarioSpec spec =
        builtin_scenario(scenario_id, layout, cfg.arena, cfg.channel, cfg.seed);
    const std::string path = join_path(out_dir, "scenario-" + scenario_id + ".dataset");
    save_dataset(dataset_from_spec(spec, provenance), path);
    out.files.push_back(path);
  }
  return out;
}

TrainOutcome cmd_train(const HarnessConfig& cfg, const std::vector<std::string>& dataset_paths,
                       bool grid, const std::string& out_dir) {
  if (dataset_paths.empty()) throw ConfigError("train needs at least one dataset");
  ensure_dir(out_dir);

  std::vector<RangeSample> all;
  AnchorLayout layout;
  std::string layout_fp;
  json inputs = json::array();
  for (const std::string& path : dataset_paths) {
    const std::string bytes = slurp(path);
    DatasetFile file = load_dataset(path);
    if (layout_fp.empty()) {
      layout = file.layout;
      layout_fp = layout.fingerprint();
    } else if (file.layout.fingerprint() != layout_fp) {
      throw DataError("dataset " + path + " uses a different anchor layout than the first one");
    }
    all.insert(all.end(), std::make_move_iterator(file.samples.begin()),
               std::make_move_iterator(file.samples.end()));
    inputs.push_back(input_entry(base_name(path), bytes));
  }
  if (all.empty()) throw DataError("training datasets contain no samples");

  const double norm = default_norm_scale(layout, cfg.arena);
  const TrainConfig tc = train_config_for(cfg, cfg.seed);
  json meta = provenance_base(cfg, "train");
  meta["inputs"] = inputs;
  meta["samples"] = static_cast<int>(all.size());

  TrainOutcome out;
  out.samples = static_cast<int>(all.size());

  NetworkShape shape = shape_for(cfg, layout);
  TrainConfig final_tc = tc;
  if (grid) {
    const GridResult gr = grid_search(all, GridSpec{}, tc, norm, layout_fp);
    out.grid_entries = static_cast<int>(gr.leaderboard.size());
    out.grid_rejected = static_cast<int>(gr.rejected.size());
    shape = gr.best.shape;
    final_tc = gr.best.cfg;
    final_tc.rng_seed = tc.rng_seed;

    std::string body;
    body += "#%uwbnov-grid 1\n";
    body += "#%meta " + meta.dump() + "\n";
    body += "rank\tn_e1\tn_e2\tn_d1\tbatch_size\tlearning_rate\tval_loss\tparam_count\n";
    for (std::size_t r = 0; r < gr.leaderboard.size(); ++r) {
      const GridEntry& e = gr.leaderboard[r];
      appendf(body, "%zu\t%d\t%d\t%d\t%d\t%s\t%s\t%ld\n", r + 1, e.shape.n_e1, e.shape.n_e2,
              e.shape.n_d1, e.cfg.batch_size, fmt9(e.cfg.learning_rate).c_str(),
              fmt9(e.val_loss).c_str(), e.param_count);
    }
    for (const GridRejection& rej : gr.rejected) {
      const json r = {{"n_e1", rej.shape.n_e1},
                      {"n_e2", rej.shape.n_e2},
                      {"n_d1", rej.shape.n_d1},
                      {"reason", rej.reason}};
      body += "#%rejected " + r.dump() + "\n";
    }
    out.leaderboard_file = join_path(out_dir, "grid.tsv");
    write_text(out.leaderboard_file, body);
    meta["grid"] = {{"entries", out.grid_entries},
                    {"rejected", out.grid_rejected},
                    {"best_val_loss", gr.best.val_loss}};
  }

  std::vector<double> epoch_loss;
  const AutoencoderModel model = train(all, shape, final_tc, norm, layout_fp, &epoch_loss);
  out.final_loss = epoch_loss.empty() ? 0.0 : epoch_loss.back();
  meta["final_loss"] = out.final_loss;
  meta["epochs"] = final_tc.epochs;

  out.model_file = join_path(out_dir, "model.json");
  save_model(model, out.model_file, meta);
  return out;
}

EvaluateOutcome cmd_evaluate(const HarnessConfig& cfg, const std::string& dataset_path,
                             const std::string& model_path, const std::string& mode,
                             const std::string& out_dir, bool force) {
  const FilterMode fmode = parse_mode(mode);
  const bool is_static = fmode == FilterMode::Static;
  ensure_dir(out_dir);

  const std::string dataset_bytes = slurp(dataset_path);
  const DatasetFile data = load_dataset(dataset_path);
  if (data.samples.empty()) throw DataError("dataset has no records: " + dataset_path);

  json meta = provenance_base(cfg, "evaluate");
  meta["inputs"].push_back(input_entry(base_name(dataset_path), dataset_bytes));
  meta["mode"] = mode;
  if (data.meta.contains("scenario") && data.meta["scenario"].is_string()) {
    meta["scenario"] = data.meta["scenario"];
  }

  AutoencoderModel model;
  if (!is_static) {
    if (model_path.empty()) throw ConfigError("adaptive modes need a trained model file");
    const std::string model_bytes = slurp(model_path);
    model = load_model(model_path);
    if (model.shape.n_in != static_cast<int>(data.layout.size())) {
      throw DataError("model expects " + std::to_string(model.shape.n_in) +
                      " inputs but the dataset has " + std::to_string(data.layout.size()) +
                      " anchors");
    }
    if (model.layout_fingerprint != data.layout.fingerprint() && !force) {
      throw DataError("model layout fingerprint " + model.layout_fingerprint +
                      " does not match dataset layout " + data.layout.fingerprint() +
                      "; pass force to run anyway");
    }
    meta["inputs"].push_back(input_entry(base_name(model_path), model_bytes));
  }

  const FilterState init = initial_state(data.samples.front(), data.layout);
  const std::vector<FilterState> trace =
      is_static ? run_static(data.samples, cfg.ekf.static_sigma2, data.layout, cfg.ekf.noise,
                             init, cfg.ekf.staleness_cap_s)
                : run_adaptive(data.samples, model, cfg.cmap, cfg.bmap, data.layout,
                               cfg.ekf.noise, init, fmode == FilterMode::Full,
                               cfg.ekf.staleness_cap_s);
  const std::vector<Pose2D> est = estimate_poses(trace);
  std::vector<NoveltyVector> scores;
  if (!is_static) scores = score_series(model, data.samples);

  EvaluateOutcome out;
  out.samples = static_cast<int>(data.samples.size());

  {
    std::string body;
    body += "#%uwbnov-trace 1\n";
    body += "#%meta " + meta.dump() + "\n";
    std::string cols = "t,x,y,vx,vy";
    if (data.has_truth) cols += ",truth_x,truth_y";
    if (!is_static) {
      for (std::size_t i = 0; i < data.layout.size(); ++i) cols += ",n" + std::to_string(i);
    }
    body += "#%columns " + cols + "\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const FilterState& s = trace[k];
      body += fmt9(s.t);
      body += " " + fmt9(s.mean(0)) + " " + fmt9(s.mean(1));
      body += " " + fmt9(s.mean(2)) + " " + fmt9(s.mean(3));
      if (data.has_truth) {
        body += " " + fmt9(data.samples[k].truth->x) + " " + fmt9(data.samples[k].truth->y);
      }
      if (!is_static) {
        for (double n : scores[k].scores) body += " " + fmt9(n);
      }
      body += "\n";
    }
    out.trace_file = join_path(out_dir, "trace.txt");
    write_text(out.trace_file, body);
  }

  if (data.has_truth) {
    std::vector<Pose2D> truth;
    truth.reserve(data.samples.size());
    for (const RangeSample& s : data.samples) truth.push_back(*s.truth);
    const ErrorSeries series = error_series(est, truth);
    const MetricsReport report = compute_metrics(series);
    out.metrics = report;

    json doc;
    doc["format_version"] = 1;
    doc["kind"] = "uwbnov-metrics";
    doc["meta"] = meta;
    doc["mode"] = mode;
    doc["scenario"] = meta.contains("scenario") ? meta["scenario"] : json(nullptr);
    doc["samples"] = out.samples;
    doc["rmse_x_cm"] = report.rmse_x_cm;
    doc["rmse_y_cm"] = report.rmse_y_cm;
    doc["rmse_tot_cm"] = report.rmse_tot_cm;
    doc["mae_x_cm"] = report.mae_x_cm;
    doc["mae_y_cm"] = report.mae_y_cm;
    doc["mae_tot_cm"] = report.mae_tot_cm;
    out.metrics_json = join_path(out_dir, "metrics.json");
    write_text(out.metrics_json, doc.dump(2) + "\n");

    std::string body;
    body += "#%uwbnov-metrics-text 1\n";
    body += "#%meta " + meta.dump() + "\n";
    appendf(body, "mode     : %s\n", mode.c_str());
    if (meta.contains("scenario")) {
      appendf(body, "scenario : %s\n", meta["scenario"].get<std::string>().c_str());
    }
    appendf(body, "samples  : %d\n", out.samples);
    appendf(body, "%-8s %10s %10s\n", "", "rmse_cm", "mae_cm");
    appendf(body, "%-8s %10.2f %10.2f\n", "x", report.rmse_x_cm, report.mae_x_cm);
    appendf(body, "%-8s %10.2f %10.2f\n", "y", report.rmse_y_cm, report.mae_y_cm);
    appendf(body, "%-8s %10.2f %10.2f\n", "total", report.rmse_tot_cm, report.mae_tot_cm);
    out.metrics_text = join_path(out_dir, "metrics.txt");
    write_text(out.metrics_text, body);

    {
      std::string cdf;
      cdf += "#%uwbnov-cdf 1\n";
      cdf += "#%meta " + meta.dump() + "\n";
      cdf += "error_cm\tprobability\n";
      for (const CdfPoint& p : empirical_cdf(series)) {
        cdf += fmt9(p.error_cm) + "\t" + fmt9(p.probability) + "\n";
      }
      out.cdf_file = join_path(out_dir, "cdf.tsv");
      write_text(out.cdf_file, cdf);
    }
    {
      std::string pdf;
      pdf += "#%uwbnov-pdf 1\n";
      pdf += "#%meta " + meta.dump() + "\n";
      pdf += "lo_cm\thi_cm\tcount\tdensity\n";
      for (const HistogramBin& b : error_histogram(series)) {
        appendf(pdf, "%s\t%s\t%zu\t%s\n", fmt9(b.lo_cm).c_str(), fmt9(b.hi_cm).c_str(), b.count,
                fmt9(b.density).c_str());
      }
      out.pdf_file = join_path(out_dir, "pdf.tsv");
      write_text(out.pdf_file, pdf);
    }
  }

  if (!is_static) {
    // The grid must cover every estimate, including ones the filter places
    // slightly outside the nominal room.
    Arena grid_arena = cfg.arena;
    for (const Pose2D& p : est) {
      grid_arena.xmin = std::min(grid_arena.xmin, p.x);
      grid_arena.xmax = std::max(grid_arena.xmax, p.x);
      grid_arena.ymin = std::min(grid_arena.ymin, p.y);
      grid_arena.ymax = std::max(grid_arena.ymax, p.y);
    }
    const HeatmapGrid grid =
        novelty_heatmap(est, scores, grid_arena, cfg.eval.heatmap_nx, cfg.eval.heatmap_ny);
    std::string body;
    body += "#%uwbnov-heatmap 1\n";
    body += "#%meta " + meta.dump() + "\n";
    body += "ix\tiy\tx_lo\tx_hi\ty_lo\ty_hi\tmean_novelty\tcount\n";
    const double cw = grid.arena.width() / grid.nx;
    const double ch = grid.arena.height() / grid.ny;
    for (int iy = 0; iy < grid.ny; ++iy) {
      for (int ix = 0; ix < grid.nx; ++ix) {
        const std::size_t idx = grid.index(ix, iy);
        appendf(body, "%d\t%d\t%s\t%s\t%s\t%s\t%s\t%zu\n", ix, iy,
                fmt9(grid.arena.xmin + cw * ix).c_str(),
                fmt9(grid.arena.xmin + cw * (ix + 1)).c_str(),
                fmt9(grid.arena.ymin + ch * iy).c_str(),
                fmt9(grid.arena.ymin + ch * (iy + 1)).c_str(), fmt9(grid.cell_mean[idx]).c_str(),
                grid.cell_count[idx]);
      }
    }
    out.heatmap_file = join_path(out_dir, "heatmap.tsv");
    write_text(out.heatmap_file, body);
  }

  return out;
}

AblateOutcome cmd_ablate(const HarnessConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);

  std::vector<std::string> variants = cfg.ablate.layout_variants;
  if (variants.empty()) variants = builtin_layout_variants();
  const std::vector<std::string>& known_variants = builtin_layout_variants();
  for (const std::string& v : variants) {
    if (std::find(known_variants.begin(), known_variants.end(), v) == known_variants.end()) {
      throw ConfigError("ablation layout variant '" + v + "' is not a built-in variant");
    }
  }
  std::vector<std::string> ids = cfg.ablate.scenarios;
  if (ids.empty()) ids = builtin_scenario_ids();
  const std::vector<std::string> known_ids = builtin_scenario_ids();
  for (const std::string& id : ids) {
    if (std::find(known_ids.begin(), known_ids.end(), id) == known_ids.end()) {
      throw ConfigError("ablation scenario '" + id + "' is not a built-in scenario");
    }
  }
  static const std::vector<std::string> kModes = {"static", "adaptive-no-bias", "adaptive-full"};

  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(cfg.ablate.seeds));
  for (int s = 0; s < cfg.ablate.seeds; ++s) {
    seeds.push_back(cfg.seed + static_cast<std::uint64_t>(s));
  }

  AblateOutcome out;
  out.cells.resize(variants.size() * ids.size() * kModes.size());
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    for (std::size_t ii = 0; ii < ids.size(); ++ii) {
      for (std::size_t mi = 0; mi < kModes.size(); ++mi) {
        AblateCell& cell = out.cells[(vi * ids.size() + ii) * kModes.size() + mi];
        cell.variant = variants[vi];
        cell.scenario = ids[ii];
        cell.mode = kModes[mi];
        cell.nlos = scenario_is_nlos(ids[ii]);
        cell.per_seed_rmse_tot_cm.assign(seeds.size(), 0.0);
      }
    }
  }

  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    const AnchorLayout layout = builtin_layout(variants[vi], cfg.arena);
    const double norm = default_norm_scale(layout, cfg.arena);
    const NetworkShape shape = shape_for(cfg, layout);
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const std::uint64_t seed = seeds[si];
      std::vector<RangeSample> trainset;
      for (const ScenarioSpec& spec :
           training_scenarios(layout, cfg.arena, cfg.channel, cfg.train, seed)) {
        std::vector<RangeSample> part = simulate_ranges(spec);
        trainset.insert(trainset.end(), std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
      }
      const AutoencoderModel model =
          train(trainset, shape, train_config_for(cfg, seed), norm, layout.fingerprint());

      for (std::size_t ii = 0; ii < ids.size(); ++ii) {
        const ScenarioSpec spec =
            builtin_scenario(ids[ii], layout, cfg.arena, cfg.channel, seed);
        const std::vector<RangeSample> samples = simulate_ranges(spec);
        const FilterState init = initial_state(samples.front(), layout);
        for (std::size_t mi = 0; mi < kModes.size(); ++mi) {
          std::vector<FilterState> trace;
          if (mi == 0) {
            trace = run_static(samples, cfg.ekf.static_sigma2, layout, cfg.ekf.noise, init,
                               cfg.ekf.staleness_cap_s);
          } else {
            trace = run_adaptive(samples, model, cfg.cmap, cfg.bmap, layout, cfg.ekf.noise,
                                 init, mi == 2, cfg.ekf.staleness_cap_s);
          }
          AblateCell& cell = out.cells[(vi * ids.size() + ii) * kModes.size() + mi];
          cell.per_seed_rmse_tot_cm[si] = trace_rmse_tot_cm(trace, samples);
          ++out.filter_runs;
        }
      }
    }
  }

  for (AblateCell& cell : out.cells) {
    double sum = 0.0;
    for (double v : cell.per_seed_rmse_tot_cm) sum += v;
    cell.mean_rmse_tot_cm = sum / static_cast<double>(cell.per_seed_rmse_tot_cm.size());
  }

  const json meta = provenance_base(cfg, "ablate");

  {
    json doc;
    doc["format_version"] = 1;
    doc["kind"] = "uwbnov-ablation";
    doc["meta"] = meta;
    doc["seeds"] = seeds;
    doc["modes"] = kModes;
    json cells = json::array();
    for (const AblateCell& cell : out.cells) {
      cells.push_back({{"variant", cell.variant},
                       {"scenario", cell.scenario},
                       {"mode", cell.mode},
                       {"nlos", cell.nlos},
                       {"mean_rmse_tot_cm", cell.mean_rmse_tot_cm},
                       {"per_seed_rmse_tot_cm", cell.per_seed_rmse_tot_cm}});
    }
    doc["cells"] = cells;
    out.json_file = join_path(out_dir, "ablation.json");
    write_text(out.json_file, doc.dump(2) + "\n");
  }

  {
    std::string body;
    body += "#%uwbnov-ablation 1\n";
    body += "#%meta " + meta.dump() + "\n";
    appendf(body, "mean rmse_tot_cm over %zu seed(s)\n\n", seeds.size());
    appendf(body, "%-8s %-9s %-12s %-7s %9s %17s %14s\n", "variant", "scenario", "trajectory",
            "nlos", "static", "adaptive-no-bias", "adaptive-full");
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      for (std::size_t ii = 0; ii < ids.size(); ++ii) {
        const std::size_t base = (vi * ids.size() + ii) * kModes.size();
        const ScenarioInfo& info = scenario_info(ids[ii]);
        appendf(body, "%-8s %-9s %-12s %-7s %9.2f %17.2f %14.2f\n", variants[vi].c_str(),
                ids[ii].c_str(), info.trajectory, info.nlos_level,
                out.cells[base + 0].mean_rmse_tot_cm, out.cells[base + 1].mean_rmse_tot_cm,
                out.cells[base + 2].mean_rmse_tot_cm);
      }
    }
    out.table_file = join_path(out_dir, "ablation.txt");
    write_text(out.table_file, body);
  }

  return out;
}

ReportOutcome cmd_report(const HarnessConfig& cfg, const std::vector<std::string>& run_dirs,
                         const std::string& out_dir) {
  if (run_dirs.empty()) throw ConfigError("report needs at least one evaluate run directory");
  ensure_dir(out_dir);

  struct ModeStat {
    double rmse_sum = 0.0;
    double mae_sum = 0.0;
    int runs = 0;
  };
  std::map<std::string, std::map<std::string, ModeStat>> groups;
  json inputs = json::array();

  for (const std::string& dir : run_dirs) {
    const std::string path = join_path(dir, "metrics.json");
    const std::string bytes = slurp(path);
    json doc;
    try {
      doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
      throw DataError(path + " is not valid structured text: " + e.what());
    }
    if (!doc.contains("format_version") || doc["format_version"] != 1 ||
        doc.value("kind", "") != "uwbnov-metrics") {
      throw DataError(path + " has an incompatible metrics schema");
    }
    try {
      const std::string mode = doc.at("mode").get<std::string>();
      const double rmse = doc.at("rmse_tot_cm").get<double>();
      const double mae = doc.at("mae_tot_cm").get<double>();
      std::string label;
      if (doc.contains("scenario") && doc["scenario"].is_string() &&
          !doc["scenario"].get<std::string>().empty()) {
        label = doc["scenario"].get<std::string>();
      } else {
        const std::string fp =
            doc.at("meta").at("inputs").at(0).at("fingerprint").get<std::string>();
        label = "dataset-" + fp.substr(0, 8);
      }
      ModeStat& stat = groups[label][mode];
      stat.rmse_sum += rmse;
      stat.mae_sum += mae;
      stat.runs += 1;
    } catch (const json::exception& e) {
      throw DataError(path + " is missing required metric fields: " + e.what());
    }
    inputs.push_back(input_entry(base_name(dir) + "/metrics.json", bytes));
  }

  json meta = provenance_base(cfg, "report");
  meta["inputs"] = inputs;

  static const std::vector<std::string> kModes = {"static", "adaptive-no-bias", "adaptive-full"};
  ReportOutcome out;
  double impr_sum = 0.0;
  int impr_runs = 0;

  json rows = json::array();
  std::string body;
  body += "#%uwbnov-report 1\n";
  body += "#%meta " + meta.dump() + "\n";
  body += "rmse_tot_cm by filter mode, improvement of adaptive-full vs static\n\n";
  appendf(body, "%-18s %9s %17s %14s %16s\n", "scenario", "static", "adaptive-no-bias",
          "adaptive-full", "improvement_pct");
  for (const auto& [label, by_mode] : groups) {
    json row;
    row["scenario"] = label;
    json modes = json::object();
    appendf(body, "%-18s", label.c_str());
    const ModeStat* stat_static = nullptr;
    if (auto it = by_mode.find("static"); it != by_mode.end()) stat_static = &it->second;
    json improvements = json::object();
    for (std::size_t mi = 0; mi < kModes.size(); ++mi) {
      const int width = mi == 0 ? 9 : (mi == 1 ? 17 : 14);
      auto it = by_mode.find(kModes[mi]);
      if (it == by_mode.end()) {
        appendf(body, " %*s", width, "-");
        continue;
      }
      const double rmse = it->second.rmse_sum / it->second.runs;
      const double mae = it->second.mae_sum / it->second.runs;
      modes[kModes[mi]] = {{"rmse_tot_cm", rmse}, {"mae_tot_cm", mae}, {"runs", it->second.runs}};
      appendf(body, " %*.2f", width, rmse);
      if (mi > 0 && stat_static != nullptr && stat_static->rmse_sum > 0.0) {
        const double base = stat_static->rmse_sum / stat_static->runs;
        improvements[kModes[mi]] = (base - rmse) / base * 100.0;
      }
    }
    if (improvements.contains("adaptive-full")) {
      const double impr = improvements["adaptive-full"].get<double>();
      appendf(body, " %16.2f", impr);
      impr_sum += impr;
      impr_runs += 1;
    } else {
      appendf(body, " %16s", "-");
    }
    body += "\n";
    row["modes"] = modes;
    row["improvement_pct"] = improvements;
    rows.push_back(row);
  }
  if (impr_runs > 0) {
    out.average_improvement_pct = impr_sum / impr_runs;
    appendf(body, "\naverage adaptive-full improvement vs static: %.1f%%\n",
            *out.average_improvement_pct);
  }

  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "uwbnov-report";
  doc["meta"] = meta;
  doc["rows"] = rows;
  if (out.average_improvement_pct) {
    doc["average_improvement_pct"] = *out.average_improvement_pct;
  } else {
    doc["average_improvement_pct"] = nullptr;
  }
  out.json_file = join_path(out_dir, "report.json");
  write_text(out.json_file, doc.dump(2) + "\n");
  out.table_file = join_path(out_dir, "report.txt");
  write_text(out.table_file, body);
  return out;
}

}  // namespace uwbnov
