#pragma once

#include <cstddef>
#include <vector>

#include "autoencoder.hpp"
#include "geometry.hpp"
#include "trajectory.hpp"

namespace uwbnov {

// Signed per-sample estimate-vs-truth errors, in meters.
struct ErrorSeries {
  std::vector<double> ex;
  std::vector<double> ey;
};

// Scalar summary of an error series. Centimeters throughout.
struct MetricsReport {
  double rmse_x_cm = 0.0;
  double rmse_y_cm = 0.0;
  double rmse_tot_cm = 0.0;
  double mae_x_cm = 0.0;
  double mae_y_cm = 0.0;
  double mae_tot_cm = 0.0;
};

struct CdfPoint {
  double error_cm = 0.0;
  double probability = 0.0;
};

struct HistogramBin {
  double lo_cm = 0.0;
  double hi_cm = 0.0;
  std::size_t count = 0;
  double density = 0.0;  // count / (n * bin width)
};

// Per-cell mean novelty over an nx-by-ny tiling of the arena. Cells that saw
// no sample stay NaN with count 0; an empty cell is not a zero-score cell.
struct HeatmapGrid {
  int nx = 0;
  int ny = 0;
  Arena arena;
  std::vector<double> cell_mean;         // row-major, index iy * nx + ix
  std::vector<std::size_t> cell_count;

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(ix);
  }
  bool cell_empty(int ix, int iy) const { return cell_count[index(ix, iy)] == 0; }
  double grand_mean() const;  // mean over non-empty cells; error when all are empty
};

ErrorSeries error_series(const std::vector<Pose2D>& estimates,
                         const std::vector<Pose2D>& truths);

// rmse_tot is the RMS of the Euclidean error norms (so rmse_tot^2 =
// rmse_x^2 + rmse_y^2); mae_tot is the mean Euclidean error norm, which is
// not decomposable into the per-axis MAEs.
MetricsReport compute_metrics(const ErrorSeries& series);

// Right-continuous step CDF of the Euclidean error magnitudes: ascending
// magnitudes, one point per distinct value carrying rank/n.
std::vector<CdfPoint> empirical_cdf(const ErrorSeries& series);

// Equal-width histogram of the error magnitudes; Freedman-Diaconis width with
// a range/sqrt(n) fallback when the interquartile range collapses.
std::vector<HistogramBin> error_histogram(const ErrorSeries& series);

// One novelty vector per pose; the cell statistic is the mean over samples of
// the per-sample mean-over-anchors score. Poses outside the arena are errors.
HeatmapGrid novelty_heatmap(const std::vector<Pose2D>& poses,
                            const std::vector<NoveltyVector>& scores, const Arena& arena,
                            int nx = 4, int ny = 4);

}  // namespace uwbnov
