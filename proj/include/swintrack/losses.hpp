#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swintrack/config.hpp"
#include "swintrack/heads.hpp"

namespace swintrack {

// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside every log.
inline constexpr double kProbClamp = 1e-6;

// Varifocal loss of one prediction p against target score q:
// -q (q log p + (1 - q) log(1 - p)) for q > 0, -alpha p^gamma log(1 - p) for q = 0.
double varifocal_loss(double p, double q, double alpha, double gamma);
// Binary cross-entropy against a hard 0/1 label.
double binary_cross_entropy(double p, double label);

// Positive/negative split of the search grid for one ground-truth box.
struct AssignmentTarget {
  std::vector<std::uint8_t> positive;  // per cell
  std::vector<double> q;               // per cell target score, filled by prepare_targets
  BBox gt;
  std::size_t num_positive = 0;
};

// Cells whose centre lies in [x, x + w) x [y, y + h) of `gt` are positive.
// When none qualify but the box overlaps the grid, the cell nearest to the
// box centre is the single positive. A box entirely off the grid yields none.
AssignmentTarget assign_targets(const BBox& gt, GridShape grid, std::size_t stride);

}  // namespace swintrack

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Sum over elements of varifocal_loss(p_i, q_i); q is a constant target.
Tensor varifocal_loss(const Tensor& p, std::span<const double> q, double alpha, double gamma);
// Mean binary cross-entropy against hard labels.
Tensor bce_loss_variant(const Tensor& p, std::span<const double> labels);
// Sum over rows with nonzero weight of weight_j * (1 - giou(box_j, gt)).
// `boxes` holds (x1, y1, x2, y2) rows.
Tensor weighted_giou_loss(const Tensor& boxes, const BBox& gt, std::span<const double> weights);

// Quantities the loss treats as constants, taken from the current
// prediction: IACS targets q (IoU of each positive cell's decoded box with
// the ground truth) and the regression weights (predicted scores at
// positive cells).
struct LossTargets {
  AssignmentTarget assignment;
  std::vector<double> reg_weights;
};

LossTargets prepare_targets(const ResponseMap& response, const BBox& gt, std::size_t stride,
                            const LossConfig& config);

// Varifocal loss against the IACS targets normalised by max(1, positives).
// In BCE mode the target is the hard positive mask and the loss is a plain mean.
Tensor classification_loss(const ResponseMap& response, const LossTargets& targets,
                           const LossConfig& config);

// Weighted GIoU loss over positive cells normalised by max(1, positives).
Tensor regression_loss(const Tensor& boxes, const LossTargets& targets);

struct LossBreakdown {
  Tensor total;
  double cls = 0.0;
  double reg = 0.0;
};

// cls_weight * classification + reg_weight * regression for one sample.
LossBreakdown compute_loss(const ResponseMap& response, const LossTargets& targets, std::size_t stride,
                           const LossConfig& config);
LossBreakdown compute_loss(const ResponseMap& response, const BBox& gt, std::size_t stride,
                           const LossConfig& config);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
