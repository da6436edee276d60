#include <algorithm>
#include <cmath>
#include <limits>

#include "swintrack/losses.hpp"

namespace swintrack {

double varifocal_loss(double p, double q, double alpha, double gamma) {
  p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  if (q > 0.0) return -q * (q * std::log(p) + (1.0 - q) * std::log(1.0 - p));
  return -alpha * std::pow(p, gamma) * std::log(1.0 - p);
}

double binary_cross_entropy(double p, double label) {
  p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

AssignmentTarget assign_targets(const BBox& gt, GridShape grid, std::size_t stride) {
  AssignmentTarget target;
  target.gt = gt;
  target.positive.assign(grid.size(), 0);
  target.q.assign(grid.size(), 0.0);
  const double s = static_cast<double>(stride);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double cx = (static_cast<double>(i % grid.cols) + 0.5) * s;
    const double cy = (static_cast<double>(i / grid.cols) + 0.5) * s;
    if (cx >= gt.x && cx < gt.right() && cy >= gt.y && cy < gt.bottom()) {
      target.positive[i] = 1;
      ++target.num_positive;
    }
  }
  const double width = static_cast<double>(grid.cols) * s;
  const double height = static_cast<double>(grid.rows) * s;
  const bool overlaps = gt.right() > 0.0 && gt.x < width && gt.bottom() > 0.0 && gt.y < height;
  if (target.num_positive == 0 && overlaps) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double cx = (static_cast<double>(i % grid.cols) + 0.5) * s;
      const double cy = (static_cast<double>(i / grid.cols) + 0.5) * s;
      const double dist = std::hypot(cx - gt.cx(), cy - gt.cy());
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    target.positive[best] = 1;
    target.num_positive = 1;
  }
  return target;
}

}  // namespace swintrack
