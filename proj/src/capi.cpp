#include "uwbnov/uwbnov.h"

#include <new>
#include <string>
#include <utility>
#include <vector>

#include "autoencoder.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "dataset_io.hpp"
#include "ekf.hpp"
#include "errors.hpp"
#include "mapping.hpp"

namespace {

thread_local std::string g_error;

uwbnov_status arg_error(const char* msg) {
  g_error = msg;
  return UWBNOV_ERR_CONFIG;
}

template <typename Fn>
uwbnov_status guarded(Fn&& fn) {
  try {
    const uwbnov_status s = fn();
    if (s == UWBNOV_OK) g_error.clear();
    return s;
  } catch (const uwbnov::ConfigError& e) {
    g_error = e.what();
    return UWBNOV_ERR_CONFIG;
  } catch (const uwbnov::DataError& e) {
    g_error = e.what();
    return UWBNOV_ERR_DATA;
  } catch (const uwbnov::IoError& e) {
    g_error = e.what();
    return UWBNOV_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return UWBNOV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return UWBNOV_ERR_INTERNAL;
  } catch (...) {
    g_error = "unknown failure";
    return UWBNOV_ERR_INTERNAL;
  }
}

uwbnov::HarnessConfig config_for(const char* config_path, int has_seed, uint64_t seed) {
  uwbnov::HarnessConfig cfg = (config_path != nullptr && *config_path != '\0')
                                  ? uwbnov::load_config(config_path)
                                  : uwbnov::default_config();
  if (has_seed != 0) cfg.seed = seed;
  return cfg;
}

std::vector<std::string> string_list(const char* const* items, size_t n, const char* what) {
  if (n > 0 && items == nullptr) {
    throw uwbnov::ConfigError(std::string(what) + " array is null");
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (items[i] == nullptr) throw uwbnov::ConfigError(std::string(what) + " entry is null");
    out.emplace_back(items[i]);
  }
  return out;
}

}  // namespace

struct uwbnov_model {
  uwbnov::AutoencoderModel m;
};

struct uwbnov_dataset {
  uwbnov::DatasetFile f;
};

struct uwbnov_filter {
  uwbnov::FilterRunner runner;
};

extern "C" {

const char* uwbnov_last_error(void) { return g_error.c_str(); }

const char* uwbnov_version(void) { return "0.1.0"; }

uwbnov_status uwbnov_cmd_simulate(const char* config_path, int has_seed, uint64_t seed,
                                  const char* scenario_id, int training, const char* out_dir) {
  return guarded([&]() -> uwbnov_status {
    if (out_dir == nullptr || *out_dir == '\0') return arg_error("out_dir is required");
    uwbnov::cmd_simulate(config_for(config_path, has_seed, seed),
                         scenario_id != nullptr ? scenario_id : "", training != 0, out_dir);
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_cmd_train(const char* config_path, int has_seed, uint64_t seed,
                               const char* const* dataset_paths, size_t n_datasets, int grid,
                               const char* out_dir) {
  return guarded([&]() -> uwbnov_status {
    if (out_dir == nullptr || *out_dir == '\0') return arg_error("out_dir is required");
    uwbnov::cmd_train(config_for(config_path, has_seed, seed),
                      string_list(dataset_paths, n_datasets, "dataset path"), grid != 0,
                      out_dir);
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_cmd_evaluate(const char* config_path, int has_seed, uint64_t seed,
                                  const char* dataset_path, const char* model_path,
                                  const char* mode, const char* out_dir, int force) {
  return guarded([&]() -> uwbnov_status {
    if (out_dir == nullptr || *out_dir == '\0') return arg_error("out_dir is required");
    if (dataset_path == nullptr || *dataset_path == '\0') {
      return arg_error("dataset_path is required");
    }
    if (mode == nullptr || *mode == '\0') return arg_error("mode is required");
    uwbnov::cmd_evaluate(config_for(config_path, has_seed, seed), dataset_path,
                         model_path != nullptr ? model_path : "", mode, out_dir, force != 0);
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_cmd_ablate(const char* config_path, int has_seed, uint64_t seed,
                                const char* out_dir) {
  return guarded([&]() -> uwbnov_status {
    if (out_dir == nullptr || *out_dir == '\0') return arg_error("out_dir is required");
    uwbnov::cmd_ablate(config_for(config_path, has_seed, seed), out_dir);
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_cmd_report(const char* config_path, int has_seed, uint64_t seed,
                                const char* const* run_dirs, size_t n_dirs,
                                const char* out_dir) {
  return guarded([&]() -> uwbnov_status {
    if (out_dir == nullptr || *out_dir == '\0') return arg_error("out_dir is required");
    uwbnov::cmd_report(config_for(config_path, has_seed, seed),
                       string_list(run_dirs, n_dirs, "run directory"), out_dir);
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_model_load(const char* path, uwbnov_model** out) {
  return guarded([&]() -> uwbnov_status {
    if (path == nullptr || out == nullptr) return arg_error("path and out are required");
    *out = new uwbnov_model{uwbnov::load_model(path)};
    return UWBNOV_OK;
  });
}

void uwbnov_model_free(uwbnov_model* model) { delete model; }

uwbnov_status uwbnov_model_input_width(const uwbnov_model* model, size_t* out) {
  return guarded([&]() -> uwbnov_status {
    if (model == nullptr || out == nullptr) return arg_error("model and out are required");
    *out = static_cast<size_t>(model->m.shape.n_in);
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_model_novelty(const uwbnov_model* model, const double* ranges, size_t n,
                                   double* scores_out) {
  return guarded([&]() -> uwbnov_status {
    if (model == nullptr || ranges == nullptr || scores_out == nullptr) {
      return arg_error("model, ranges and scores_out are required");
    }
    if (n != static_cast<size_t>(model->m.shape.n_in)) {
      return arg_error("range vector length does not match the model input width");
    }
    const uwbnov::NoveltyVector nv =
        uwbnov::novelty_score(model->m, std::vector<double>(ranges, ranges + n));
    for (size_t i = 0; i < n; ++i) scores_out[i] = nv.scores[i];
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_dataset_load(const char* path, uwbnov_dataset** out) {
  return guarded([&]() -> uwbnov_status {
    if (path == nullptr || out == nullptr) return arg_error("path and out are required");
    *out = new uwbnov_dataset{uwbnov::load_dataset(path)};
    return UWBNOV_OK;
  });
}

void uwbnov_dataset_free(uwbnov_dataset* dataset) { delete dataset; }

uwbnov_status uwbnov_dataset_size(const uwbnov_dataset* dataset, size_t* out) {
  return guarded([&]() -> uwbnov_status {
    if (dataset == nullptr || out == nullptr) return arg_error("dataset and out are required");
    *out = dataset->f.samples.size();
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_dataset_anchor_count(const uwbnov_dataset* dataset, size_t* out) {
  return guarded([&]() -> uwbnov_status {
    if (dataset == nullptr || out == nullptr) return arg_error("dataset and out are required");
    *out = dataset->f.layout.size();
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_dataset_sample(const uwbnov_dataset* dataset, size_t index, double* t_out,
                                    double* ranges_out, int* has_truth_out,
                                    double* truth_xy_out) {
  return guarded([&]() -> uwbnov_status {
    if (dataset == nullptr) return arg_error("dataset is required");
    if (index >= dataset->f.samples.size()) {
      g_error = "sample index out of range";
      return UWBNOV_ERR_DATA;
    }
    const uwbnov::RangeSample& s = dataset->f.samples[index];
    if (t_out != nullptr) *t_out = s.t;
    if (ranges_out != nullptr) {
      for (size_t i = 0; i < s.ranges.size(); ++i) ranges_out[i] = s.ranges[i];
    }
    if (has_truth_out != nullptr) *has_truth_out = s.truth.has_value() ? 1 : 0;
    if (truth_xy_out != nullptr && s.truth.has_value()) {
      truth_xy_out[0] = s.truth->x;
      truth_xy_out[1] = s.truth->y;
    }
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_filter_create_static(const uwbnov_dataset* dataset, double sigma2,
                                          double q_pos, double q_vel, double staleness_cap_s,
                                          uwbnov_filter** out) {
  return guarded([&]() -> uwbnov_status {
    if (dataset == nullptr || out == nullptr) return arg_error("dataset and out are required");
    if (dataset->f.samples.empty()) {
      g_error = "dataset has no records to initialize from";
      return UWBNOV_ERR_DATA;
    }
    const uwbnov::ProcessNoise noise{q_pos, q_vel};
    const uwbnov::FilterState init =
        uwbnov::initial_state(dataset->f.samples.front(), dataset->f.layout);
    *out = new uwbnov_filter{uwbnov::FilterRunner(dataset->f.layout, noise, init,
                                                  staleness_cap_s,
                                                  uwbnov::static_context_builder(sigma2))};
    return UWBNOV_OK;
  });
}

uwbnov_status uwbnov_filter_create_adaptive(const uwbnov_dataset* dataset,
                                            const uwbnov_model* model, int use_bias,
                                            double q_pos, double q_vel, double staleness_cap_s,
                                            uwbnov_filter** out) {
  return guarded([&]() -> uwbnov_status {
    if (dataset == nullptr || model == nullptr || out == nullptr) {
      return arg_error("dataset, model and out are required");
    }
    if (dataset->f.samples.empty()) {
      g_error = "dataset has no records to initialize from";
      return UWBNOV_ERR_DATA;
    }
    if (model->m.shape.n_in != static_cast<int>(dataset->f.layout.size())) {
      g_error = "model input width does not match the dataset anchor count";
      return UWBNOV_ERR_DATA;
    }
    if (model->m.layout_fingerprint != dataset->f.layout.fingerprint()) {
      g_error = "model layout fingerprint does not match the dataset layout";
      return UWBNOV_ERR_DATA;
    }
    const uwbnov::ProcessNoise noise{q_pos, q_vel};
    const uwbnov::FilterState init =
        uwbnov::initial_state(dataset->f.samples.front(), dataset->f.layout);
    *out = new uwbnov_filter{uwbnov::FilterRunner(
        dataset->f.layout, noise, init, staleness_cap_s,
        uwbnov::adaptive_context_builder(model->m, uwbnov::CovarianceMap{}, uwbnov::BiasMap{},
                                         use_bias != 0))};
    return UWBNOV_OK;
  });
}

void uwbnov_filter_free(uwbnov_filter* filter) { delete filter; }

uwbnov_status uwbnov_filter_step(uwbnov_filter* filter, double t, const double* ranges,
                                 size_t n, double* x_out, double* y_out, double* vx_out,
                                 double* vy_out) {
  return guarded([&]() -> uwbnov_status {
    if (filter == nullptr || ranges == nullptr) {
      return arg_error("filter and ranges are required");
    }
    if (n != filter->runner.layout().size()) {
      return arg_error("range vector length does not match the filter layout");
    }
    uwbnov::RangeSample sample;
    sample.t = t;
    sample.ranges.assign(ranges, ranges + n);
    const uwbnov::FilterState state = filter->runner.step(sample);
    if (x_out != nullptr) *x_out = state.mean(0);
    if (y_out != nullptr) *y_out = state.mean(1);
    if (vx_out != nullptr) *vx_out = state.mean(2);
    if (vy_out != nullptr) *vy_out = state.mean(3);
    return UWBNOV_OK;
  });
}

}  // extern "C"
