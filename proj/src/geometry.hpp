#pragma once

#include <optional>
#include <string>
#include <vector>

namespace uwbnov {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Planar robot pose. Heading is informational only; the filter state does not
// carry it.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> heading;  // radians in (-pi, pi]
};

struct Anchor {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Fixed anchor constellation plus the (constant) tag mounting height.
// Anchor order is the canonical index space for every range vector, novelty
// vector and covariance diagonal in the system.
class AnchorLayout {
 public:
  AnchorLayout() = default;
  AnchorLayout(std::vector<Anchor> anchors, double tag_height);

  std::size_t size() const { return anchors_.size(); }
  const std::vector<Anchor>& anchors() const { return anchors_; }
  const Anchor& anchor(std::size_t i) const { return anchors_[i]; }
  double tag_height() const { return tag_height_; }

  // Stable 64-bit FNV-1a hash of the anchor geometry; stored in trained
  // models so a model is never silently applied to a different constellation.
  std::string fingerprint() const;

 private:
  std::vector<Anchor> anchors_;
  double tag_height_ = 0.0;
};

// One timestamped vector of per-anchor ranges, ordered like the layout.
// Ground truth is present for simulated data, absent for blind replays.
// NaN range entries mean "no reading from this anchor at this tick".
struct RangeSample {
  double t = 0.0;
  std::vector<double> ranges;
  std::optional<Pose2D> truth;
};

// Tag-to-anchor Euclidean distance with the tag at fixed height.
double true_range(const Pose2D& pose, const Anchor& anchor, double tag_height);

}  // namespace uwbnov
