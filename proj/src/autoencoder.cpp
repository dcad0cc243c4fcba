#include "autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace uwbnov {
namespace {

using json = nlohmann::json;

struct ForwardCache {
  std::array<Eigen::MatrixXd, 4> z;  // pre-activations per layer
  std::array<Eigen::MatrixXd, 4> a;  // post-activations per layer
};

Eigen::MatrixXd relu(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd leaky(const Eigen::MatrixXd& z, double slope) {
  return z.array().max(z.array() * slope).matrix();
}

// Columns of X are samples. Returns activations; a[3] is the reconstruction.
ForwardCache forward_batch(const AutoencoderModel& m, const Eigen::MatrixXd& X) {
  ForwardCache c;
  const Eigen::MatrixXd* in = &X;
  for (int l = 0; l < 4; ++l) {
    c.z[l] = (m.W[l] * (*in)).colwise() + m.b[l];
    c.a[l] = l < 3 ? relu(c.z[l]) : leaky(c.z[l], m.leaky_slope);
    in = &c.a[l];
  }
  return c;
}

double batch_loss(const AutoencoderModel& m, const Eigen::MatrixXd& X) {
  const ForwardCache c = forward_batch(m, X);
  const Eigen::MatrixXd diff = c.a[3] - X;
  return diff.squaredNorm() / (static_cast<double>(X.rows()) * X.cols());
}

// Gradients of mean-over-batch, mean-over-components squared error.
Gradients backward_batch(const AutoencoderModel& m, const Eigen::MatrixXd& X) {
  const ForwardCache c = forward_batch(m, X);
  const auto B = static_cast<double>(X.cols());
  const auto n = static_cast<double>(X.rows());

  Gradients g;
  const Eigen::MatrixXd diff = c.a[3] - X;
  g.loss = diff.squaredNorm() / (n * B);

  // output layer: LeakyReLU derivative is 1 for z >= 0, slope below
  const Eigen::ArrayXXd dleaky =
      (c.z[3].array() >= 0.0).cast<double>() * (1.0 - m.leaky_slope) + m.leaky_slope;
  Eigen::MatrixXd delta = ((2.0 / (n * B)) * diff.array() * dleaky).matrix();
  for (int l = 3; l >= 0; --l) {
    const Eigen::MatrixXd& input = l == 0 ? X : c.a[l - 1];
    g.dW[l] = delta * input.transpose();
    g.db[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = ((m.W[l].transpose() * delta).array() * (c.z[l - 1].array() > 0.0).cast<double>())
                  .matrix();
    }
  }
  return g;
}

std::array<int, 5> layer_widths(const NetworkShape& s) {
  return {s.n_in, s.n_e1, s.n_e2, s.n_d1, s.n_in};
}

AutoencoderModel init_model(const NetworkShape& shape, double norm_scale,
                            const std::string& fingerprint, Rng& rng) {
  AutoencoderModel m;
  m.shape = shape;
  m.norm_scale = norm_scale;
  m.layout_fingerprint = fingerprint;
  const auto w = layer_widths(shape);
  for (int l = 0; l < 4; ++l) {
    const int out = w[l + 1], in = w[l];
    m.W[l].resize(out, in);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (int r = 0; r < out; ++r)
      for (int cidx = 0; cidx < in; ++cidx) m.W[l](r, cidx) = rng.uniform(-bound, bound);
    m.b[l] = Eigen::VectorXd::Zero(out);
  }
  return m;
}

Eigen::MatrixXd dataset_matrix(const std::vector<RangeSample>& dataset, int n_in,
                               double norm_scale) {
  if (dataset.empty()) throw DataError("training dataset is empty");
  Eigen::MatrixXd X(n_in, static_cast<Eigen::Index>(dataset.size()));
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    const auto& r = dataset[k].ranges;
    if (static_cast<int>(r.size()) != n_in) {
      throw DataError("sample " + std::to_string(k) + " has " + std::to_string(r.size()) +
                      " ranges, network expects " + std::to_string(n_in));
    }
    for (int i = 0; i < n_in; ++i) {
      if (!std::isfinite(r[i])) {
        throw DataError("sample " + std::to_string(k) + " contains a non-finite range");
      }
      X(i, static_cast<Eigen::Index>(k)) = r[i] / norm_scale;
    }
  }
  return X;
}

}  // namespace

void NetworkShape::validate() const {
  if (n_in < 1 || n_e1 < 1 || n_e2 < 1 || n_d1 < 1) {
    throw ConfigError("network widths must be at least 1");
  }
  if (!(n_in < n_e1 && n_e1 < n_e2)) {
    throw ConfigError("encoder must widen: need n_in < n_e1 < n_e2, got " +
                      std::to_string(n_in) + "/" + std::to_string(n_e1) + "/" +
                      std::to_string(n_e2));
  }
  if (!(n_e2 > n_d1 && n_d1 > n_in)) {
    throw ConfigError("decoder must narrow but stay overcomplete: need n_e2 > n_d1 > n_in, got " +
                      std::to_string(n_e2) + "/" + std::to_string(n_d1) + "/" +
                      std::to_string(n_in));
  }
}

long NetworkShape::parameter_count() const {
  const auto w = layer_widths(*this);
  long total = 0;
  for (int l = 0; l < 4; ++l) total += static_cast<long>(w[l + 1]) * w[l] + w[l + 1];
  return total;
}

std::vector<double> normalize(const std::vector<double>& ranges, double norm_scale) {
  if (!(norm_scale > 0.0)) throw ConfigError("norm_scale must be positive");
  std::vector<double> out(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) out[i] = ranges[i] / norm_scale;
  return out;
}

double default_norm_scale(const AnchorLayout& layout, const Arena& arena) {
  double worst = 0.0;
  const double corners[4][2] = {{arena.xmin, arena.ymin},
                                {arena.xmax, arena.ymin},
                                {arena.xmax, arena.ymax},
                                {arena.xmin, arena.ymax}};
  for (const Anchor& a : layout.anchors()) {
    for (const auto& c : corners) {
      const double d = true_range(Pose2D{c[0], c[1], {}}, a, layout.tag_height());
      worst = std::max(worst, d);
    }
  }
  return std::ceil(worst);
}

Eigen::VectorXd forward(const AutoencoderModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.shape.n_in) {
    throw DataError("forward: input width " + std::to_string(x.size()) + " != network input " +
                    std::to_string(model.shape.n_in));
  }
  return forward_batch(model, x).a[3].col(0);
}

AutoencoderModel train(const std::vector<RangeSample>& dataset, const NetworkShape& shape,
                       const TrainConfig& cfg, double norm_scale,
                       const std::string& layout_fingerprint,
                       std::vector<double>* epoch_loss_out) {
  shape.validate();
  if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0)) {
    throw ConfigError("training needs epochs >= 1, batch_size >= 1, learning_rate > 0");
  }
  if (!(norm_scale > 0.0)) throw ConfigError("norm_scale must be positive");

  const Eigen::MatrixXd X = dataset_matrix(dataset, shape.n_in, norm_scale);
  const auto n = X.cols();

  Rng rng(cfg.rng_seed);
  AutoencoderModel m = init_model(shape, norm_scale, layout_fingerprint, rng);

  std::array<Eigen::MatrixXd, 4> mW, vW;
  std::array<Eigen::VectorXd, 4> mb, vb;
  for (int l = 0; l < 4; ++l) {
    mW[l] = Eigen::MatrixXd::Zero(m.W[l].rows(), m.W[l].cols());
    vW[l] = mW[l];
    mb[l] = Eigen::VectorXd::Zero(m.b[l].size());
    vb[l] = mb[l];
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index bsz = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Eigen::MatrixXd batch(shape.n_in, bsz);
      for (Eigen::Index k = 0; k < bsz; ++k) {
        batch.col(k) = X.col(static_cast<Eigen::Index>(order[static_cast<std::size_t>(start + k)]));
      }
      const Gradients g = backward_batch(m, batch);
      if (!std::isfinite(g.loss)) {
        throw DataError("training diverged: non-finite loss at epoch " + std::to_string(epoch));
      }
      ++step;
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      for (int l = 0; l < 4; ++l) {
        mW[l] = cfg.adam_beta1 * mW[l] + (1.0 - cfg.adam_beta1) * g.dW[l];
        vW[l] = cfg.adam_beta2 * vW[l] + (1.0 - cfg.adam_beta2) * g.dW[l].cwiseProduct(g.dW[l]);
        m.W[l].array() -=
            cfg.learning_rate * (mW[l].array() / c1) / ((vW[l].array() / c2).sqrt() + cfg.adam_eps);
        mb[l] = cfg.adam_beta1 * mb[l] + (1.0 - cfg.adam_beta1) * g.db[l];
        vb[l] = cfg.adam_beta2 * vb[l] + (1.0 - cfg.adam_beta2) * g.db[l].cwiseProduct(g.db[l]);
        m.b[l].array() -=
            cfg.learning_rate * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + cfg.adam_eps);
      }
    }
    const double epoch_loss = batch_loss(m, X);
    if (!std::isfinite(epoch_loss)) {
      throw DataError("training diverged: non-finite loss after epoch " + std::to_string(epoch));
    }
    if (epoch_loss_out) epoch_loss_out->push_back(epoch_loss);
  }
  return m;
}

NoveltyVector novelty_score(const AutoencoderModel& model, const std::vector<double>& ranges) {
  if (static_cast<int>(ranges.size()) != model.shape.n_in) {
    throw DataError("novelty_score: got " + std::to_string(ranges.size()) +
                    " ranges, network expects " + std::to_string(model.shape.n_in));
  }
  Eigen::VectorXd x(model.shape.n_in);
  for (int i = 0; i < model.shape.n_in; ++i) x[i] = ranges[static_cast<std::size_t>(i)] / model.norm_scale;
  const Eigen::VectorXd recon = forward_batch(model, x).a[3].col(0);
  NoveltyVector nv;
  nv.scores.resize(static_cast<std::size_t>(model.shape.n_in));
  for (int i = 0; i < model.shape.n_in; ++i) nv.scores[static_cast<std::size_t>(i)] = std::abs(recon[i] - x[i]);
  return nv;
}

AutoencoderModel make_random_model(const NetworkShape& shape, double norm_scale,
                                   std::uint64_t seed) {
  shape.validate();
  if (!(norm_scale > 0.0)) throw ConfigError("norm_scale must be positive");
  Rng rng(seed);
  return init_model(shape, norm_scale, "", rng);
}

Gradients compute_gradients(const AutoencoderModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.shape.n_in) throw DataError("compute_gradients: input width mismatch");
  return backward_batch(model, x);
}

double max_relative_gradient_error(const AutoencoderModel& model, const Eigen::VectorXd& x,
                                   const Gradients& analytic) {
  const double h = 1e-5;
  AutoencoderModel probe = model;
  const double mid = batch_loss(probe, x);
  double worst = 0.0;
  auto compare = [&](double analytic_g, double& param) {
    const double saved = param;
    param = saved + h;
    const double up = batch_loss(probe, x);
    param = saved - h;
    const double dn = batch_loss(probe, x);
    param = saved;
    // A probe interval that straddles an activation kink averages two linear
    // pieces instead of measuring the derivative. The discrete second
    // difference is O(h^2) on smooth stretches but O(h) across a kink, so
    // those probes are excluded as invalid measurements (the analytic value
    // plays no part in the decision).
    if (std::abs(up + dn - 2.0 * mid) > 1e-7 * std::max(1.0, std::abs(mid))) return;
    const double numeric = (up - dn) / (2.0 * h);
    // Gradients this small are indistinguishable from finite-difference noise
    // around activation kinks; treat them as agreeing.
    const double denom = std::max(std::abs(analytic_g), std::abs(numeric));
    if (denom < 1e-5) return;
    worst = std::max(worst, std::abs(analytic_g - numeric) / denom);
  };
  for (int l = 0; l < 4; ++l) {
    for (Eigen::Index r = 0; r < probe.W[l].rows(); ++r)
      for (Eigen::Index c = 0; c < probe.W[l].cols(); ++c)
        compare(analytic.dW[l](r, c), probe.W[l](r, c));
    for (Eigen::Index r = 0; r < probe.b[l].size(); ++r)
      compare(analytic.db[l][r], probe.b[l][r]);
  }
  return worst;
}

double gradient_check(const AutoencoderModel& model, const Eigen::VectorXd& x) {
  return max_relative_gradient_error(model, x, compute_gradients(model, x));
}

GridResult grid_search(const std::vector<RangeSample>& dataset, const GridSpec& grid,
                       const TrainConfig& tmpl, double norm_scale,
                       const std::string& layout_fingerprint) {
  if (dataset.empty()) throw DataError("grid search needs a non-empty dataset");
  if (grid.e1_d1.empty() || grid.e2.empty() || grid.batch_size.empty() ||
      grid.learning_rate.empty()) {
    throw ConfigError("grid search axes must all be non-empty");
  }
  const int n_in = static_cast<int>(dataset[0].ranges.size());

  // Deterministic 80/20 split shared by every combination.
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(tmpl.rng_seed, 0x517ULL));
  split_rng.shuffle(order);
  const std::size_t n_train = std::max<std::size_t>(1, dataset.size() * 8 / 10);
  std::vector<RangeSample> train_set, val_set;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_train ? train_set : val_set).push_back(dataset[order[k]]);
  }
  if (val_set.empty()) val_set.push_back(train_set.back());

  GridResult result;
  std::uint64_t combo = 0;
  for (int e1 : grid.e1_d1)
    for (int e2 : grid.e2)
      for (int bs : grid.batch_size)
        for (double lr : grid.learning_rate) {
          NetworkShape shape{n_in, e1, e2, e1};
          ++combo;
          try {
            shape.validate();
          } catch (const ConfigError& err) {
            if (bs == grid.batch_size.front() && lr == grid.learning_rate.front()) {
              result.rejected.push_back({shape, err.what()});
            }
            continue;
          }
          TrainConfig cfg = tmpl;
          cfg.batch_size = bs;
          cfg.learning_rate = lr;
          cfg.rng_seed = derive_seed(tmpl.rng_seed, combo);
          const AutoencoderModel m =
              train(train_set, shape, cfg, norm_scale, layout_fingerprint);
          const Eigen::MatrixXd V = dataset_matrix(val_set, n_in, norm_scale);
          GridEntry entry;
          entry.shape = shape;
          entry.cfg = cfg;
          entry.val_loss = batch_loss(m, V);
          entry.param_count = shape.parameter_count();
          result.leaderboard.push_back(entry);
        }

  if (result.leaderboard.empty()) {
    throw ConfigError("grid search has no admissible shape combinations");
  }
  std::stable_sort(result.leaderboard.begin(), result.leaderboard.end(),
                   [](const GridEntry& a, const GridEntry& b) {
                     if (a.val_loss != b.val_loss) return a.val_loss < b.val_loss;
                     if (a.param_count != b.param_count) return a.param_count < b.param_count;
                     return a.cfg.learning_rate < b.cfg.learning_rate;
                   });
  result.best = result.leaderboard.front();
  return result;
}

void save_model(const AutoencoderModel& model, const std::string& path,
                const nlohmann::json& meta) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "range-novelty-autoencoder";
  if (!meta.is_null()) doc["meta"] = meta;
  doc["shape"] = {{"n_in", model.shape.n_in},
                  {"n_e1", model.shape.n_e1},
                  {"n_e2", model.shape.n_e2},
                  {"n_d1", model.shape.n_d1}};
  doc["leaky_slope"] = model.leaky_slope;
  doc["norm_scale"] = model.norm_scale;
  doc["layout_fingerprint"] = model.layout_fingerprint;
  json layers = json::array();
  for (int l = 0; l < 4; ++l) {
    json layer;
    layer["rows"] = model.W[l].rows();
    layer["cols"] = model.W[l].cols();
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(model.W[l].size()));
    for (Eigen::Index r = 0; r < model.W[l].rows(); ++r)
      for (Eigen::Index c = 0; c < model.W[l].cols(); ++c) w.push_back(model.W[l](r, c));
    layer["w"] = w;
    std::vector<double> bias(model.b[l].data(), model.b[l].data() + model.b[l].size());
    layer["b"] = bias;
    layers.push_back(layer);
  }
  doc["layers"] = layers;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed writing model file: " + path);
}

AutoencoderModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw DataError("model file is not valid structured text: " + std::string(e.what()));
  }
  if (!doc.contains("format_version")) throw DataError("model file lacks format_version");
  if (doc["format_version"].get<int>() != 1) {
    throw DataError("unsupported model format_version " + doc["format_version"].dump());
  }
  AutoencoderModel m;
  try {
    m.shape.n_in = doc.at("shape").at("n_in").get<int>();
    m.shape.n_e1 = doc.at("shape").at("n_e1").get<int>();
    m.shape.n_e2 = doc.at("shape").at("n_e2").get<int>();
    m.shape.n_d1 = doc.at("shape").at("n_d1").get<int>();
    m.leaky_slope = doc.at("leaky_slope").get<double>();
    m.norm_scale = doc.at("norm_scale").get<double>();
    m.layout_fingerprint = doc.at("layout_fingerprint").get<std::string>();
    const auto& layers = doc.at("layers");
    if (layers.size() != 4) throw DataError("model file must contain exactly 4 layers");
    for (int l = 0; l < 4; ++l) {
      const auto rows = layers[static_cast<std::size_t>(l)].at("rows").get<Eigen::Index>();
      const auto cols = layers[static_cast<std::size_t>(l)].at("cols").get<Eigen::Index>();
      const auto w = layers[static_cast<std::size_t>(l)].at("w").get<std::vector<double>>();
      const auto bias = layers[static_cast<std::size_t>(l)].at("b").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
          static_cast<Eigen::Index>(bias.size()) != rows) {
        throw DataError("layer " + std::to_string(l) + " dimensions disagree with its arrays");
      }
      m.W[l].resize(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
          m.W[l](r, c) = w[static_cast<std::size_t>(r * cols + c)];
      m.b[l] = Eigen::Map<const Eigen::VectorXd>(bias.data(),
                                                 static_cast<Eigen::Index>(bias.size()));
    }
  } catch (const json::exception& e) {
    throw DataError("model file is missing required fields: " + std::string(e.what()));
  }
  m.shape.validate();
  const auto widths = std::array<Eigen::Index, 5>{m.shape.n_in, m.shape.n_e1, m.shape.n_e2,
                                                  m.shape.n_d1, m.shape.n_in};
  for (int l = 0; l < 4; ++l) {
    if (m.W[l].rows() != widths[static_cast<std::size_t>(l) + 1] ||
        m.W[l].cols() != widths[static_cast<std::size_t>(l)]) {
      throw DataError("layer " + std::to_string(l) + " shape disagrees with the network shape");
    }
  }
  return m;
}

}  // namespace uwbnov
