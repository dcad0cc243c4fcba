#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace uwbnov {
namespace {

void check_series(const ErrorSeries& series) {
  if (series.ex.empty()) throw DataError("error series is empty");
  if (series.ex.size() != series.ey.size()) {
    throw DataError("error series axes have different lengths");
  }
  for (std::size_t i = 0; i < series.ex.size(); ++i) {
    if (!std::isfinite(series.ex[i]) || !std::isfinite(series.ey[i])) {
      throw DataError("non-finite error at sample " + std::to_string(i));
    }
  }
}

std::vector<double> magnitudes_cm(const ErrorSeries& series) {
  check_series(series);
  std::vector<double> m(series.ex.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = 100.0 * std::hypot(series.ex[i], series.ey[i]);
  }
  return m;
}

// Linear-interpolated quantile of a sorted vector (the common "type 7" rule).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

ErrorSeries error_series(const std::vector<Pose2D>& estimates,
                         const std::vector<Pose2D>& truths) {
  if (estimates.size() != truths.size()) {
    throw DataError("estimate and truth series have different lengths");
  }
  ErrorSeries out;
  out.ex.reserve(estimates.size());
  out.ey.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    out.ex.push_back(truths[i].x - estimates[i].x);
    out.ey.push_back(truths[i].y - estimates[i].y);
  }
  return out;
}

MetricsReport compute_metrics(const ErrorSeries& series) {
  check_series(series);
  const double n = static_cast<double>(series.ex.size());
  double sxx = 0.0, syy = 0.0, sax = 0.0, say = 0.0, snorm = 0.0;
  for (std::size_t i = 0; i < series.ex.size(); ++i) {
    const double ex = series.ex[i], ey = series.ey[i];
    sxx += ex * ex;
    syy += ey * ey;
    sax += std::abs(ex);
    say += std::abs(ey);
    snorm += std::hypot(ex, ey);
  }
  MetricsReport r;
  r.rmse_x_cm = 100.0 * std::sqrt(sxx / n);
  r.rmse_y_cm = 100.0 * std::sqrt(syy / n);
  r.rmse_tot_cm = 100.0 * std::sqrt((sxx + syy) / n);
  r.mae_x_cm = 100.0 * (sax / n);
  r.mae_y_cm = 100.0 * (say / n);
  r.mae_tot_cm = 100.0 * (snorm / n);
  return r;
}

std::vector<CdfPoint> empirical_cdf(const ErrorSeries& series) {
  std::vector<double> m = magnitudes_cm(series);
  std::sort(m.begin(), m.end());
  const double n = static_cast<double>(m.size());
  std::vector<CdfPoint> out;
  out.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const CdfPoint pt{m[i], static_cast<double>(i + 1) / n};
    if (!out.empty() && out.back().error_cm == pt.error_cm) {
      out.back().probability = pt.probability;  // collapse ties onto the upper rank
    } else {
      out.push_back(pt);
    }
  }
  return out;
}

std::vector<HistogramBin> error_histogram(const ErrorSeries& series) {
  std::vector<double> m = magnitudes_cm(series);
  std::sort(m.begin(), m.end());
  const auto n = m.size();
  const double lo = m.front();
  const double hi = m.back();

  if (!(hi > lo)) {
    // all magnitudes equal: a single degenerate bin carries everything
    return {HistogramBin{lo, hi, n, 0.0}};
  }

  const double iqr = quantile_sorted(m, 0.75) - quantile_sorted(m, 0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  if (!(width > 0.0)) {
    width = (hi - lo) / std::ceil(std::sqrt(static_cast<double>(n)));
  }
  const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  width = (hi - lo) / static_cast<double>(bins);  // re-span so the bins tile exactly

  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo_cm = lo + static_cast<double>(b) * width;
    out[b].hi_cm = lo + static_cast<double>(b + 1) * width;
  }
  out.back().hi_cm = hi;
  for (double v : m) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    if (b >= bins) b = bins - 1;  // the maximum lands in the last bin
    ++out[b].count;
  }
  for (HistogramBin& bin : out) {
    bin.density = static_cast<double>(bin.count) / (static_cast<double>(n) * width);
  }
  return out;
}

double HeatmapGrid::grand_mean() const {
  double sum = 0.0;
  std::size_t filled = 0;
  for (std::size_t i = 0; i < cell_mean.size(); ++i) {
    if (cell_count[i] == 0) continue;
    sum += cell_mean[i];
    ++filled;
  }
  if (filled == 0) throw DataError("heatmap has no occupied cell");
  return sum / static_cast<double>(filled);
}

HeatmapGrid novelty_heatmap(const std::vector<Pose2D>& poses,
                            const std::vector<NoveltyVector>& scores, const Arena& arena,
                            int nx, int ny) {
  if (nx < 1 || ny < 1) throw ConfigError("heatmap grid needs at least one cell per axis");
  if (!(arena.width() > 0.0) || !(arena.height() > 0.0)) {
    throw ConfigError("heatmap arena must have positive extent");
  }
  if (poses.size() != scores.size()) {
    throw DataError("heatmap needs one novelty vector per pose");
  }

  HeatmapGrid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.arena = arena;
  grid.cell_mean.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny),
                        std::numeric_limits<double>::quiet_NaN());
  grid.cell_count.assign(grid.cell_mean.size(), 0);
  std::vector<double> sums(grid.cell_mean.size(), 0.0);

  const double cell_w = arena.width() / nx;
  const double cell_h = arena.height() / ny;
  for (std::size_t k = 0; k < poses.size(); ++k) {
    const Pose2D& p = poses[k];
    if (!arena.contains(p.x, p.y)) {
      throw DataError("heatmap pose " + std::to_string(k) + " lies outside the arena");
    }
    if (scores[k].scores.empty()) {
      throw DataError("heatmap sample " + std::to_string(k) + " has no novelty scores");
    }
    auto ix = static_cast<long>((p.x - arena.xmin) / cell_w);
    auto iy = static_cast<long>((p.y - arena.ymin) / cell_h);
    ix = std::clamp(ix, 0L, static_cast<long>(nx - 1));
    iy = std::clamp(iy, 0L, static_cast<long>(ny - 1));

    double mean_score = 0.0;
    for (double s : scores[k].scores) mean_score += s;
    mean_score /= static_cast<double>(scores[k].scores.size());

    const std::size_t idx = grid.index(static_cast<int>(ix), static_cast<int>(iy));
    sums[idx] += mean_score;
    ++grid.cell_count[idx];
  }
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (grid.cell_count[i] > 0) {
      grid.cell_mean[i] = sums[i] / static_cast<double>(grid.cell_count[i]);
    }
  }
  return grid;
}

}  // namespace uwbnov
