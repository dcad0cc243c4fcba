#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "autoencoder.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "dataset_io.hpp"
#include "errors.hpp"
#include "scenarios.hpp"

using namespace uwbnov;
using nlohmann::json;

namespace {

std::string temp_dir(const std::string& stem) {
  const std::string dir = (std::filesystem::temp_directory_path() / stem).string();
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& body) {
  std::size_t n = 0;
  for (char c : body) n += c == '\n';
  return n;
}

// Short training captures keep the suite quick; everything else stays at the
// defaults so the pipeline exercised here matches the real one.
HarnessConfig fast_config() {
  HarnessConfig cfg = default_config();
  cfg.train.trajectories = 2;
  cfg.train.duration_s = 8.0;
  return cfg;
}

struct Pipeline {
  HarnessConfig cfg;
  std::string root;
  std::vector<std::string> train_files;
  TrainOutcome trained;
  std::string scenario1;
};

const Pipeline& pipeline() {
  static const Pipeline p = [] {
    Pipeline q;
    q.cfg = fast_config();
    q.root = temp_dir("cmd_fixture");
    q.train_files = cmd_simulate(q.cfg, "", true, q.root + "/train").files;
    q.trained = cmd_train(q.cfg, q.train_files, false, q.root + "/model");
    q.scenario1 = cmd_simulate(q.cfg, "1", false, q.root + "/data").files.front();
    return q;
  }();
  return p;
}

}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("simulate writes deterministic provenance-stamped datasets") {
    const HarnessConfig cfg = fast_config();
    const std::string a = temp_dir("cmd_sim_a");
    const std::string b = temp_dir("cmd_sim_b");
    const SimulateOutcome ra = cmd_simulate(cfg, "1", false, a);
    const SimulateOutcome rb = cmd_simulate(cfg, "1", false, b);
    REQUIRE(ra.files.size() == 1);
    CHECK(std::filesystem::path(ra.files[0]).filename() == "scenario-1.dataset");
    CHECK(slurp(ra.files[0]) == slurp(rb.files[0]));

    const DatasetFile f = load_dataset(ra.files[0]);
    CHECK(std::llabs(static_cast<long long>(f.samples.size()) - 500) <= 1);
    CHECK(f.has_truth);
    CHECK(f.meta.at("scenario") == "1");
    const json& prov = f.meta.at("provenance");
    CHECK(prov.at("command") == "simulate");
    CHECK(prov.at("config_fingerprint") == config_fingerprint(cfg));
    CHECK(prov.at("seed") == cfg.seed);

    const SimulateOutcome r4 = cmd_simulate(cfg, "4", false, a);
    const DatasetFile f4 = load_dataset(r4.files[0]);
    CHECK(std::llabs(static_cast<long long>(f4.samples.size()) - 800) <= 1);
  }

  TEST_CASE("simulate training batch and selector validation") {
    const HarnessConfig cfg = fast_config();
    const std::string dir = temp_dir("cmd_sim_train");
    const SimulateOutcome r = cmd_simulate(cfg, "", true, dir);
    REQUIRE(r.files.size() == static_cast<std::size_t>(cfg.train.trajectories));
    CHECK(std::filesystem::path(r.files[0]).filename() == "train-00.dataset");
    CHECK(std::filesystem::path(r.files[1]).filename() == "train-01.dataset");
    CHECK(slurp(r.files[0]) != slurp(r.files[1]));
    for (const std::string& path : r.files) {
      const DatasetFile f = load_dataset(path);
      CHECK(f.has_truth);
      CHECK(f.samples.size() > 100);
    }

    CHECK_THROWS_AS(cmd_simulate(cfg, "1", true, dir), ConfigError);
    CHECK_THROWS_AS(cmd_simulate(cfg, "", false, dir), ConfigError);
    CHECK_THROWS_AS(cmd_simulate(cfg, "12", false, dir), ConfigError);
  }

  TEST_CASE("train fits the dataset layout and stamps provenance") {
    const Pipeline& p = pipeline();
    CHECK(p.trained.samples > 200);
    CHECK(p.trained.final_loss > 0.0);
    CHECK(p.trained.final_loss < 0.05);
    CHECK(p.trained.leaderboard_file.empty());

    const AutoencoderModel model = load_model(p.trained.model_file);
    CHECK(model.shape.n_in == 6);
    CHECK(model.shape.n_e1 == p.cfg.train.hidden_e1);
    CHECK(model.norm_scale == 7.0);
    CHECK(model.layout_fingerprint == layout_for(p.cfg).fingerprint());

    const json doc = json::parse(slurp(p.trained.model_file));
    CHECK(doc.at("meta").at("command") == "train");
    CHECK(doc.at("meta").at("inputs").size() == p.train_files.size());
    CHECK(doc.at("meta").at("samples") == p.trained.samples);

    const std::string again = temp_dir("cmd_train_again");
    const TrainOutcome r2 = cmd_train(p.cfg, p.train_files, false, again);
    CHECK(slurp(r2.model_file) == slurp(p.trained.model_file));
  }

  TEST_CASE("train input validation") {
    const Pipeline& p = pipeline();
    const std::string dir = temp_dir("cmd_train_bad");

    CHECK_THROWS_AS(cmd_train(p.cfg, {}, false, dir), ConfigError);
    CHECK_THROWS_AS(cmd_train(p.cfg, {dir + "/missing.dataset"}, false, dir), IoError);

    HarnessConfig small = fast_config();
    small.layout_variant = "hex4";
    const std::string other = cmd_simulate(small, "1", false, dir).files.front();
    CHECK_THROWS_AS(cmd_train(p.cfg, {p.train_files[0], other}, false, dir), DataError);

    DatasetFile empty;
    empty.layout = layout_for(p.cfg);
    const std::string empty_path = dir + "/empty.dataset";
    save_dataset(empty, empty_path);
    CHECK_THROWS_AS(cmd_train(p.cfg, {empty_path}, false, dir), DataError);
  }

  TEST_CASE("grid train records the full leaderboard") {
    const Pipeline& p = pipeline();
    HarnessConfig cfg = p.cfg;
    cfg.train.epochs = 2;
    const std::string dir = temp_dir("cmd_train_grid");
    const TrainOutcome r = cmd_train(cfg, {p.train_files[0]}, true, dir);
    CHECK(r.grid_entries == 30);
    CHECK(r.grid_rejected == 1);
    REQUIRE_FALSE(r.leaderboard_file.empty());

    const std::string board = slurp(r.leaderboard_file);
    CHECK(board.find("rank\tn_e1\tn_e2\tn_d1") != std::string::npos);
    CHECK(board.find("#%rejected") != std::string::npos);
    // 2 header lines + 1 column row + 30 entries + 1 rejected line
    CHECK(line_count(board) == 34);

    const AutoencoderModel model = load_model(r.model_file);
    const bool e1_ok = model.shape.n_e1 == 15 || model.shape.n_e1 == 20;
    const bool e2_ok =
        model.shape.n_e2 == 20 || model.shape.n_e2 == 30 || model.shape.n_e2 == 40;
    CHECK(e1_ok);
    CHECK(e2_ok);
    CHECK(model.shape.n_d1 == model.shape.n_e1);
  }

  TEST_CASE("evaluate adaptive-full emits the full artifact set") {
    const Pipeline& p = pipeline();
    const std::string dir = temp_dir("cmd_eval_full");
    const EvaluateOutcome r =
        cmd_evaluate(p.cfg, p.scenario1, p.trained.model_file, "adaptive-full", dir);

    REQUIRE(r.metrics.has_value());
    CHECK(r.metrics->rmse_tot_cm > 0.0);
    CHECK(r.metrics->rmse_tot_cm < 50.0);
    CHECK(r.samples > 400);

    const std::string trace = slurp(r.trace_file);
    CHECK(trace.find("#%uwbnov-trace 1\n") == 0);
    CHECK(trace.find(",truth_x,truth_y") != std::string::npos);
    CHECK(trace.find(",n0,n1,n2,n3,n4,n5") != std::string::npos);
    CHECK(line_count(trace) == static_cast<std::size_t>(r.samples) + 3);

    const json doc = json::parse(slurp(r.metrics_json));
    CHECK(doc.at("kind") == "uwbnov-metrics");
    CHECK(doc.at("mode") == "adaptive-full");
    CHECK(doc.at("scenario") == "1");
    CHECK(doc.at("rmse_tot_cm") == doctest::Approx(r.metrics->rmse_tot_cm));

    CHECK(slurp(r.metrics_text).find("rmse_cm") != std::string::npos);
    CHECK(slurp(r.cdf_file).find("error_cm\tprobability") != std::string::npos);
    CHECK(slurp(r.pdf_file).find("lo_cm\thi_cm\tcount\tdensity") != std::string::npos);
    const std::string heat = slurp(r.heatmap_file);
    CHECK(heat.find("ix\tiy\t") != std::string::npos);
    const std::size_t cells =
        static_cast<std::size_t>(p.cfg.eval.heatmap_nx) * p.cfg.eval.heatmap_ny;
    CHECK(line_count(heat) == cells + 3);
  }

  TEST_CASE("evaluate static ignores the model argument") {
    const Pipeline& p = pipeline();
    const std::string a = temp_dir("cmd_eval_static_a");
    const std::string b = temp_dir("cmd_eval_static_b");
    const EvaluateOutcome ra = cmd_evaluate(p.cfg, p.scenario1, "", "static", a);
    const EvaluateOutcome rb =
        cmd_evaluate(p.cfg, p.scenario1, p.trained.model_file, "static", b);

    CHECK(slurp(ra.trace_file) == slurp(rb.trace_file));
    CHECK(slurp(ra.metrics_json) == slurp(rb.metrics_json));
    CHECK(ra.heatmap_file.empty());
    CHECK_FALSE(std::filesystem::exists(a + "/heatmap.tsv"));
    CHECK(ra.metrics.has_value());
  }

  TEST_CASE("evaluate rejects layout mismatches unless forced") {
    const Pipeline& p = pipeline();
    const std::string dir = temp_dir("cmd_eval_force");

    HarnessConfig four = fast_config();
    four.layout_variant = "hex4";
    const std::string narrow = cmd_simulate(four, "1", false, dir + "/narrow").files.front();
    CHECK_THROWS_AS(
        cmd_evaluate(p.cfg, narrow, p.trained.model_file, "adaptive-full", dir + "/w1"),
        DataError);
    CHECK_THROWS_AS(
        cmd_evaluate(p.cfg, narrow, p.trained.model_file, "adaptive-full", dir + "/w2", true),
        DataError);

    HarnessConfig shifted = fast_config();
    std::vector<Anchor> anchors = layout_for(p.cfg).anchors();
    anchors[0].x += 0.1;
    shifted.layout_variant = "custom";
    shifted.custom_layout = AnchorLayout(anchors, layout_for(p.cfg).tag_height());
    const std::string off = cmd_simulate(shifted, "1", false, dir + "/off").files.front();
    CHECK_THROWS_AS(
        cmd_evaluate(p.cfg, off, p.trained.model_file, "adaptive-full", dir + "/f1"), DataError);
    const EvaluateOutcome forced =
        cmd_evaluate(p.cfg, off, p.trained.model_file, "adaptive-full", dir + "/f2", true);
    CHECK(std::filesystem::exists(forced.trace_file));
  }

  TEST_CASE("evaluate skips metrics without ground truth") {
    const Pipeline& p = pipeline();
    const std::string dir = temp_dir("cmd_eval_blind");

    DatasetFile f = load_dataset(p.scenario1);
    f.has_truth = false;
    for (RangeSample& s : f.samples) s.truth.reset();
    const std::string blind = dir + "/blind.dataset";
    std::filesystem::create_directories(dir);
    save_dataset(f, blind);

    const EvaluateOutcome r =
        cmd_evaluate(p.cfg, blind, p.trained.model_file, "adaptive-full", dir + "/run");
    CHECK_FALSE(r.metrics.has_value());
    CHECK(r.metrics_json.empty());
    CHECK(r.cdf_file.empty());
    CHECK(std::filesystem::exists(r.trace_file));
    CHECK(std::filesystem::exists(r.heatmap_file));
    CHECK(slurp(r.trace_file).find("truth_x") == std::string::npos);

    CHECK_THROWS_AS(cmd_evaluate(p.cfg, blind, p.trained.model_file, "kalman", dir + "/m"),
                    ConfigError);
    CHECK_THROWS_AS(cmd_evaluate(p.cfg, blind, "", "adaptive-full", dir + "/m"), ConfigError);
  }

  TEST_CASE("evaluate rerun is byte-identical") {
    const Pipeline& p = pipeline();
    const std::string a = temp_dir("cmd_eval_rerun_a");
    const std::string b = temp_dir("cmd_eval_rerun_b");
    const EvaluateOutcome ra =
        cmd_evaluate(p.cfg, p.scenario1, p.trained.model_file, "adaptive-full", a);
    const EvaluateOutcome rb =
        cmd_evaluate(p.cfg, p.scenario1, p.trained.model_file, "adaptive-full", b);
    for (const auto& [fa, fb] :
         {std::pair{ra.trace_file, rb.trace_file}, {ra.metrics_json, rb.metrics_json},
          {ra.metrics_text, rb.metrics_text}, {ra.cdf_file, rb.cdf_file},
          {ra.pdf_file, rb.pdf_file}, {ra.heatmap_file, rb.heatmap_file}}) {
      CHECK(slurp(fa) == slurp(fb));
    }
  }

  TEST_CASE("ablate sweeps the requested cells deterministically") {
    HarnessConfig cfg = fast_config();
    cfg.ablate.seeds = 1;
    cfg.ablate.scenarios = {"1", "9"};
    cfg.ablate.layout_variants = {"hex6", "hex4"};
    const std::string a = temp_dir("cmd_ablate_a");
    const std::string b = temp_dir("cmd_ablate_b");

    const AblateOutcome r = cmd_ablate(cfg, a);
    REQUIRE(r.cells.size() == 12);
    CHECK(r.filter_runs == 12);
    for (const AblateCell& cell : r.cells) {
      CAPTURE(cell.variant);
      CAPTURE(cell.scenario);
      CAPTURE(cell.mode);
      CHECK(cell.per_seed_rmse_tot_cm.size() == 1);
      CHECK(std::isfinite(cell.mean_rmse_tot_cm));
      CHECK(cell.mean_rmse_tot_cm > 0.0);
      CHECK(cell.nlos == (cell.scenario == "9"));
    }
    CHECK(r.cells[0].variant == "hex6");
    CHECK(r.cells[0].scenario == "1");
    CHECK(r.cells[0].mode == "static");
    CHECK(r.cells[11].variant == "hex4");
    CHECK(r.cells[11].mode == "adaptive-full");

    const json doc = json::parse(slurp(r.json_file));
    CHECK(doc.at("kind") == "uwbnov-ablation");
    CHECK(doc.at("cells").size() == 12);
    CHECK(doc.at("seeds") == json::array({cfg.seed}));
    const std::string table = slurp(r.table_file);
    CHECK(table.find("adaptive-full") != std::string::npos);
    CHECK(table.find("hex4") != std::string::npos);

    const AblateOutcome r2 = cmd_ablate(cfg, b);
    CHECK(slurp(r2.json_file) == slurp(r.json_file));
    CHECK(slurp(r2.table_file) == slurp(r.table_file));

    HarnessConfig bad = cfg;
    bad.ablate.scenarios = {"77"};
    CHECK_THROWS_AS(cmd_ablate(bad, a), ConfigError);
    bad = cfg;
    bad.ablate.layout_variants = {"custom"};
    CHECK_THROWS_AS(cmd_ablate(bad, a), ConfigError);
  }

  TEST_CASE("report merges runs and computes improvements") {
    const Pipeline& p = pipeline();
    const std::string root = temp_dir("cmd_report");
    const EvaluateOutcome rs = cmd_evaluate(p.cfg, p.scenario1, "", "static", root + "/static");
    const EvaluateOutcome rf =
        cmd_evaluate(p.cfg, p.scenario1, p.trained.model_file, "adaptive-full", root + "/full");

    const ReportOutcome r =
        cmd_report(p.cfg, {root + "/static", root + "/full"}, root + "/out");
    REQUIRE(r.average_improvement_pct.has_value());
    const double expected =
        (rs.metrics->rmse_tot_cm - rf.metrics->rmse_tot_cm) / rs.metrics->rmse_tot_cm * 100.0;
    CHECK(*r.average_improvement_pct == doctest::Approx(expected).epsilon(1e-9));

    const json doc = json::parse(slurp(r.json_file));
    REQUIRE(doc.at("rows").size() == 1);
    const json& row = doc.at("rows")[0];
    CHECK(row.at("scenario") == "1");
    CHECK(row.at("modes").at("static").at("rmse_tot_cm") ==
          doctest::Approx(rs.metrics->rmse_tot_cm));
    CHECK(row.at("improvement_pct").at("adaptive-full") == doctest::Approx(expected));
    const std::string table = slurp(r.table_file);
    CHECK(table.find("improvement_pct") != std::string::npos);
    CHECK(table.find("average adaptive-full improvement vs static:") != std::string::npos);

    CHECK_THROWS_AS(cmd_report(p.cfg, {}, root + "/out"), ConfigError);
    CHECK_THROWS_AS(cmd_report(p.cfg, {root + "/nosuch"}, root + "/out"), IoError);

    std::filesystem::create_directories(root + "/bad");
    std::ofstream(root + "/bad/metrics.json")
        << R"({"format_version": 2, "kind": "uwbnov-metrics"})";
    CHECK_THROWS_AS(cmd_report(p.cfg, {root + "/bad"}, root + "/out"), DataError);
    std::ofstream(root + "/bad/metrics.json")
        << R"({"format_version": 1, "kind": "uwbnov-metrics"})";
    CHECK_THROWS_AS(cmd_report(p.cfg, {root + "/bad"}, root + "/out"), DataError);
  }
}
