#ifndef UWBNOV_UWBNOV_H
#define UWBNOV_UWBNOV_H

/* C interface to the adaptive UWB localization pipeline: experiment commands
 * (simulate / train / evaluate / ablate / report) plus granular handles for
 * loading models and datasets, scoring range vectors and stepping filters.
 *
 * Every function returns a status code; the message for the most recent
 * failure on the calling thread is available from uwbnov_last_error().
 * Out-parameters are written only on UWBNOV_OK. */

#include <stddef.h>
#include <stdint.h>

#ifndef UWBNOV_API
#if defined(__GNUC__)
#define UWBNOV_API __attribute__((visibility("default")))
#else
#define UWBNOV_API
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uwbnov_status {
  UWBNOV_OK = 0,
  UWBNOV_ERR_CONFIG = 1, /* bad arguments, config file or mode selection */
  UWBNOV_ERR_DATA = 2,   /* malformed or mismatched dataset / model content */
  UWBNOV_ERR_IO = 3,     /* missing files, unwritable outputs */
  UWBNOV_ERR_INTERNAL = 4
} uwbnov_status;

/* Message for the last failing call on this thread; empty string after a
 * success. The pointer stays valid until the thread's next API call. */
UWBNOV_API const char* uwbnov_last_error(void);

UWBNOV_API const char* uwbnov_version(void);

/* ------------------------------------------------------------------ */
/* Commands. config_path selects a config file (NULL or "" for built-in
 * defaults); when has_seed is nonzero, seed replaces the config's seed. */

/* One built-in scenario (scenario_id) or, with training nonzero, the nominal
 * clear-channel training batch. Exactly one selector must be given. */
UWBNOV_API uwbnov_status uwbnov_cmd_simulate(const char* config_path, int has_seed,
                                             uint64_t seed, const char* scenario_id,
                                             int training, const char* out_dir);

/* Trains on the union of the given datasets; grid nonzero ranks the built-in
 * hyperparameter grid first and trains the winner. */
UWBNOV_API uwbnov_status uwbnov_cmd_train(const char* config_path, int has_seed, uint64_t seed,
                                          const char* const* dataset_paths, size_t n_datasets,
                                          int grid, const char* out_dir);

/* Replays a dataset through "static", "adaptive-no-bias" or "adaptive-full".
 * model_path may be NULL for static mode. force nonzero runs past a layout
 * fingerprint mismatch (never past an input-width mismatch). */
UWBNOV_API uwbnov_status uwbnov_cmd_evaluate(const char* config_path, int has_seed,
                                             uint64_t seed, const char* dataset_path,
                                             const char* model_path, const char* mode,
                                             const char* out_dir, int force);

/* Scenario x layout-variant x filter-mode sweep, averaged over seeds. */
UWBNOV_API uwbnov_status uwbnov_cmd_ablate(const char* config_path, int has_seed, uint64_t seed,
                                           const char* out_dir);

/* Merges evaluate run directories into one comparison table. */
UWBNOV_API uwbnov_status uwbnov_cmd_report(const char* config_path, int has_seed, uint64_t seed,
                                           const char* const* run_dirs, size_t n_dirs,
                                           const char* out_dir);

/* ------------------------------------------------------------------ */
/* Handles. */

typedef struct uwbnov_model uwbnov_model;
typedef struct uwbnov_dataset uwbnov_dataset;
typedef struct uwbnov_filter uwbnov_filter;

UWBNOV_API uwbnov_status uwbnov_model_load(const char* path, uwbnov_model** out);
UWBNOV_API void uwbnov_model_free(uwbnov_model* model);
UWBNOV_API uwbnov_status uwbnov_model_input_width(const uwbnov_model* model, size_t* out);

/* Per-anchor novelty scores for one range vector. n must equal the model's
 * input width; scores_out must hold n doubles. */
UWBNOV_API uwbnov_status uwbnov_model_novelty(const uwbnov_model* model, const double* ranges,
                                              size_t n, double* scores_out);

UWBNOV_API uwbnov_status uwbnov_dataset_load(const char* path, uwbnov_dataset** out);
UWBNOV_API void uwbnov_dataset_free(uwbnov_dataset* dataset);
UWBNOV_API uwbnov_status uwbnov_dataset_size(const uwbnov_dataset* dataset, size_t* out);
UWBNOV_API uwbnov_status uwbnov_dataset_anchor_count(const uwbnov_dataset* dataset,
                                                     size_t* out);

/* Record at index. ranges_out must hold anchor_count doubles (NaN marks a
 * missing reading). has_truth_out receives 0/1; when 1 and truth_xy_out is
 * non-NULL, truth_xy_out[0..1] receive the ground-truth position. Any output
 * pointer may be NULL to skip that field. */
UWBNOV_API uwbnov_status uwbnov_dataset_sample(const uwbnov_dataset* dataset, size_t index,
                                               double* t_out, double* ranges_out,
                                               int* has_truth_out, double* truth_xy_out);

/* Filters bind to the dataset's anchor layout and initialize from its first
 * record by range trilateration. q_pos / q_vel are the process-noise
 * densities; staleness_cap_s bounds hold-last imputation of missing readings.
 * The adaptive variant maps per-anchor novelty to measurement variance and
 * (use_bias nonzero) range bias with the built-in calibration curves. */
UWBNOV_API uwbnov_status uwbnov_filter_create_static(const uwbnov_dataset* dataset,
                                                     double sigma2, double q_pos, double q_vel,
                                                     double staleness_cap_s,
                                                     uwbnov_filter** out);
UWBNOV_API uwbnov_status uwbnov_filter_create_adaptive(const uwbnov_dataset* dataset,
                                                       const uwbnov_model* model, int use_bias,
                                                       double q_pos, double q_vel,
                                                       double staleness_cap_s,
                                                       uwbnov_filter** out);
UWBNOV_API void uwbnov_filter_free(uwbnov_filter* filter);

/* Advance by one timestamped range vector (strictly increasing t after the
 * first call; n must equal the layout's anchor count). Writes the posterior
 * estimate; any output pointer may be NULL. */
UWBNOV_API uwbnov_status uwbnov_filter_step(uwbnov_filter* filter, double t,
                                            const double* ranges, size_t n, double* x_out,
                                            double* y_out, double* vx_out, double* vy_out);

#ifdef __cplusplus
}
#endif

#endif /* UWBNOV_UWBNOV_H */
