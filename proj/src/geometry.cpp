#include "geometry.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

#include "errors.hpp"

namespace uwbnov {

AnchorLayout::AnchorLayout(std::vector<Anchor> anchors, double tag_height)
    : anchors_(std::move(anchors)), tag_height_(tag_height) {
  if (anchors_.size() < 3) {
    throw DataError("anchor layout needs at least 3 anchors for trilateration, got " +
                    std::to_string(anchors_.size()));
  }
  std::set<int> ids;
  for (const Anchor& a : anchors_) {
    if (!ids.insert(a.id).second) {
      throw DataError("duplicate anchor id " + std::to_string(a.id));
    }
    if (!(std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z))) {
      throw DataError("non-finite anchor position for id " + std::to_string(a.id));
    }
    if (a.z < 0.0) {
      throw DataError("anchor id " + std::to_string(a.id) + " has negative height");
    }
  }
  if (!std::isfinite(tag_height_) || tag_height_ < 0.0) {
    throw DataError("tag height must be finite and non-negative");
  }
}

std::string AnchorLayout::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const char* s) {
    for (; *s; ++s) {
      h ^= static_cast<unsigned char>(*s);
      h *= 0x100000001b3ULL;
    }
  };
  char buf[128];
  for (const Anchor& a : anchors_) {
    std::snprintf(buf, sizeof(buf), "%d:%.17g,%.17g,%.17g;", a.id, a.x, a.y, a.z);
    mix(buf);
  }
  std::snprintf(buf, sizeof(buf), "h:%.17g", tag_height_);
  mix(buf);
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double true_range(const Pose2D& pose, const Anchor& anchor, double tag_height) {
  const double dx = pose.x - anchor.x;
  const double dy = pose.y - anchor.y;
  const double dz = tag_height - anchor.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace uwbnov
