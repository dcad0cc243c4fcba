#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "geometry.hpp"
#include "trajectory.hpp"

namespace uwbnov {

// Overcomplete MLP: the hidden widths must dominate the input width on both
// sides of the latent layer.
struct NetworkShape {
  int n_in = 6;
  int n_e1 = 15;
  int n_e2 = 30;
  int n_d1 = 15;

  void validate() const;  // throws ConfigError when the ordering is violated
  long parameter_count() const;
};

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t rng_seed = 0;
};

// Four affine layers, ReLU on the first three, LeakyReLU on the output so
// reconstructions near zero keep a usable gradient.
struct AutoencoderModel {
  NetworkShape shape;
  double leaky_slope = 0.01;
  double norm_scale = 7.0;  // meters; divides raw ranges into [0, 1]
  std::string layout_fingerprint;
  std::array<Eigen::MatrixXd, 4> W;
  std::array<Eigen::VectorXd, 4> b;
};

struct NoveltyVector {
  std::vector<double> scores;  // one per anchor, layout order
};

// Elementwise ranges / norm_scale. Values stay in [0, 1] whenever norm_scale
// bounds the largest feasible range.
std::vector<double> normalize(const std::vector<double>& ranges, double norm_scale);

// Smallest whole-meter bound on the anchor-to-tag distance anywhere in the
// arena (3D, including the anchor/tag height offsets).
double default_norm_scale(const AnchorLayout& layout, const Arena& arena);

Eigen::VectorXd forward(const AutoencoderModel& model, const Eigen::VectorXd& x);

// Mini-batch Adam on mean-squared reconstruction error over normalized range
// vectors. Deterministic for a fixed seed: fixed init draw order and fixed
// shuffle order. epoch_loss_out, when given, receives the full-dataset loss
// after each epoch.
AutoencoderModel train(const std::vector<RangeSample>& dataset, const NetworkShape& shape,
                       const TrainConfig& cfg, double norm_scale,
                       const std::string& layout_fingerprint = "",
                       std::vector<double>* epoch_loss_out = nullptr);

// Per-anchor |reconstruction - input| on the normalized range vector.
NoveltyVector novelty_score(const AutoencoderModel& model, const std::vector<double>& ranges);

// Untrained model with seeded fan-in-scaled uniform weights; the same
// initialization train() starts from.
AutoencoderModel make_random_model(const NetworkShape& shape, double norm_scale,
                                   std::uint64_t seed);

struct Gradients {
  std::array<Eigen::MatrixXd, 4> dW;
  std::array<Eigen::VectorXd, 4> db;
  double loss = 0.0;
};

// Analytic gradients of the MSE reconstruction loss at x (x is both input
// and target, already normalized).
Gradients compute_gradients(const AutoencoderModel& model, const Eigen::VectorXd& x);

// Worst relative disagreement between the supplied gradients and central
// finite differences (step 1e-5). Exposed separately so tests can feed in a
// deliberately corrupted gradient as a negative control.
double max_relative_gradient_error(const AutoencoderModel& model, const Eigen::VectorXd& x,
                                   const Gradients& analytic);

double gradient_check(const AutoencoderModel& model, const Eigen::VectorXd& x);

struct GridSpec {
  std::vector<int> e1_d1{15, 20};
  std::vector<int> e2{20, 30, 40};
  std::vector<int> batch_size{16, 32, 64};
  std::vector<double> learning_rate{0.001, 0.01};
};

struct GridEntry {
  NetworkShape shape;
  TrainConfig cfg;
  double val_loss = 0.0;
  long param_count = 0;
};

struct GridRejection {
  NetworkShape shape;
  std::string reason;
};

struct GridResult {
  GridEntry best;
  std::vector<GridEntry> leaderboard;   // sorted: best first
  std::vector<GridRejection> rejected;  // shape-invariant violations, surfaced not skipped
};

// Trains every admissible grid combination on a deterministic 80/20 split and
// ranks by validation loss (ties: fewer parameters, then lower learning
// rate). Combinations that violate the overcomplete ordering are reported in
// `rejected`; an effectively empty grid is an error.
GridResult grid_search(const std::vector<RangeSample>& dataset, const GridSpec& grid,
                       const TrainConfig& tmpl, double norm_scale,
                       const std::string& layout_fingerprint = "");

// Self-describing structured-text model file; format_version is mandatory.
// A non-null meta blob is stored verbatim under "meta" (provenance: config
// fingerprint, seeds, source datasets) and ignored on load.
void save_model(const AutoencoderModel& model, const std::string& path,
                const nlohmann::json& meta = nullptr);
AutoencoderModel load_model(const std::string& path);

}  // namespace uwbnov
