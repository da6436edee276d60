#include "swintrack/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace {

detail::Node& input(detail::Node& out, std::size_t i) { return *out.inputs[i]; }

bool clamped(double p) { return p < kProbClamp || p > 1.0 - kProbClamp; }

double vfl_grad(double p, double q, double alpha, double gamma) {
  if (clamped(p)) return 0.0;
  if (q > 0.0) return -q * (q / p - (1.0 - q) / (1.0 - p));
  const double log1m = std::log(1.0 - p);
  const double dpow = gamma == 0.0 ? 0.0 : gamma * std::pow(p, gamma - 1.0);
  return -alpha * (dpow * log1m - std::pow(p, gamma) / (1.0 - p));
}

void check_targets(const Tensor& p, std::size_t n, const char* op) {
  if (p.numel() != n) {
    throw DimensionError(std::string(op) + ": " + std::to_string(n) + " targets for predictions " +
                         shape_string(p.shape()));
  }
}

}  // namespace

Tensor varifocal_loss(const Tensor& p, std::span<const double> q, double alpha, double gamma) {
  check_targets(p, q.size(), "varifocal_loss");
  double total = 0.0;
  const auto pv = p.data();
  for (std::size_t i = 0; i < q.size(); ++i) total += ::swintrack::varifocal_loss(pv[i], q[i], alpha, gamma);
  std::vector<double> targets(q.begin(), q.end());
  return make_result({1}, {static_cast<Scalar>(total)}, {p},
                     [targets = std::move(targets), alpha, gamma](detail::Node& node) {
                       detail::Node& np = input(node, 0);
                       auto& g = np.ensure_grad();
                       for (std::size_t i = 0; i < targets.size(); ++i) {
                         g[i] += static_cast<Scalar>(node.grad[0] *
                                                     vfl_grad(np.value[i], targets[i], alpha, gamma));
                       }
                     });
}

Tensor bce_loss_variant(const Tensor& p, std::span<const double> labels) {
  check_targets(p, labels.size(), "bce_loss_variant");
  double total = 0.0;
  const auto pv = p.data();
  for (std::size_t i = 0; i < labels.size(); ++i) total += binary_cross_entropy(pv[i], labels[i]);
  const double n = static_cast<double>(labels.size());
  std::vector<double> targets(labels.begin(), labels.end());
  return make_result({1}, {static_cast<Scalar>(total / n)}, {p},
                     [targets = std::move(targets), n](detail::Node& node) {
                       detail::Node& np = input(node, 0);
                       auto& g = np.ensure_grad();
                       for (std::size_t i = 0; i < targets.size(); ++i) {
                         const double pi = np.value[i];
                         if (clamped(pi)) continue;
                         const double d = -(targets[i] / pi - (1.0 - targets[i]) / (1.0 - pi));
                         g[i] += static_cast<Scalar>(node.grad[0] * d / n);
                       }
                     });
}

Tensor weighted_giou_loss(const Tensor& boxes, const BBox& gt, std::span<const double> weights) {
  if (boxes.rank() != 2 || boxes.dim(1) != 4 || boxes.dim(0) != weights.size()) {
    throw DimensionError("weighted_giou_loss: boxes " + shape_string(boxes.shape()) + " with " +
                         std::to_string(weights.size()) + " weights");
  }
  const double gx1 = gt.x, gy1 = gt.y, gx2 = gt.right(), gy2 = gt.bottom();
  const double g_area = gt.area();
  const std::size_t n = weights.size();
  // Per-row partial derivatives of (1 - giou) w.r.t. (x1, y1, x2, y2).
  std::vector<double> partials(n * 4, 0.0);
  double total = 0.0;
  const auto bv = boxes.data();
  for (std::size_t j = 0; j < n; ++j) {
    if (weights[j] == 0.0) continue;
    const double x1 = bv[j * 4], y1 = bv[j * 4 + 1], x2 = bv[j * 4 + 2], y2 = bv[j * 4 + 3];
    const double bw = x2 - x1, bh = y2 - y1;
    const double area = bw * bh;
    const double iw_raw = std::min(x2, gx2) - std::max(x1, gx1);
    const double ih_raw = std::min(y2, gy2) - std::max(y1, gy1);
    const bool overlap = iw_raw > 0.0 && ih_raw > 0.0;
    const double iw = overlap ? iw_raw : 0.0, ih = overlap ? ih_raw : 0.0;
    const double inter = iw * ih;
    const double uni = area + g_area - inter;
    const double ew = std::max(x2, gx2) - std::min(x1, gx1);
    const double eh = std::max(y2, gy2) - std::min(y1, gy1);
    const double enc = ew * eh;
    if (uni <= 0.0 || enc <= 0.0) {
      throw std::invalid_argument("weighted_giou_loss: degenerate predicted box");
    }
    // 1 - giou = 2 - I/U - U/E with U = A + G - I.
    total += weights[j] * (2.0 - inter / uni - uni / enc);

    const double d_inter = -(uni + inter) / (uni * uni) + 1.0 / enc;
    const double d_area = inter / (uni * uni) - 1.0 / enc;
    const double d_enc = uni / (enc * enc);

    double dx1 = d_area * -bh, dx2 = d_area * bh, dy1 = d_area * -bw, dy2 = d_area * bw;
    if (overlap) {
      if (x1 > gx1) dx1 += d_inter * -ih;
      if (x2 < gx2) dx2 += d_inter * ih;
      if (y1 > gy1) dy1 += d_inter * -iw;
      if (y2 < gy2) dy2 += d_inter * iw;
    }
    if (x1 < gx1) dx1 += d_enc * -eh;
    if (x2 > gx2) dx2 += d_enc * eh;
    if (y1 < gy1) dy1 += d_enc * -ew;
    if (y2 > gy2) dy2 += d_enc * ew;
    partials[j * 4 + 0] = weights[j] * dx1;
    partials[j * 4 + 1] = weights[j] * dy1;
    partials[j * 4 + 2] = weights[j] * dx2;
    partials[j * 4 + 3] = weights[j] * dy2;
  }
  return make_result({1}, {static_cast<Scalar>(total)}, {boxes},
                     [partials = std::move(partials)](detail::Node& node) {
                       auto& g = input(node, 0).ensure_grad();
                       for (std::size_t k = 0; k < partials.size(); ++k) {
                         g[k] += static_cast<Scalar>(node.grad[0] * partials[k]);
                       }
                     });
}

LossTargets prepare_targets(const ResponseMap& response, const BBox& gt, std::size_t stride,
                            const LossConfig& config) {
  LossTargets t{assign_targets(gt, response.grid, stride), {}};
  const std::size_t n = response.grid.size();
  t.reg_weights.assign(n, 0.0);
  const auto p = response.cls.data();
  const std::vector<BBox> decoded = decode_all(response, stride);
  for (std::size_t i = 0; i < n; ++i) {
    if (!t.assignment.positive[i]) continue;
    if (config.mode == LossMode::kVarifocal) t.assignment.q[i] = iou(decoded[i], gt);
    t.reg_weights[i] = p[i];
  }
  return t;
}

Tensor classification_loss(const ResponseMap& response, const LossTargets& targets,
                           const LossConfig& config) {
  const AssignmentTarget& a = targets.assignment;
  const std::size_t n = response.grid.size();
  if (a.positive.size() != n) {
    throw DimensionError("classification_loss: assignment does not match the grid");
  }
  if (config.mode == LossMode::kBce) {
    std::vector<double> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = a.positive[i] ? 1.0 : 0.0;
    return bce_loss_variant(response.cls, labels);
  }
  const double norm = static_cast<double>(std::max<std::size_t>(1, a.num_positive));
  return scale(varifocal_loss(response.cls, a.q, config.vfl_alpha, config.vfl_gamma),
               static_cast<Scalar>(1.0 / norm));
}

Tensor regression_loss(const Tensor& boxes, const LossTargets& targets) {
  const AssignmentTarget& a = targets.assignment;
  const double norm = static_cast<double>(std::max<std::size_t>(1, a.num_positive));
  return scale(weighted_giou_loss(boxes, a.gt, targets.reg_weights), static_cast<Scalar>(1.0 / norm));
}

LossBreakdown compute_loss(const ResponseMap& response, const LossTargets& targets, std::size_t stride,
                           const LossConfig& config) {
  const Tensor boxes = decode_boxes(response.reg, response.grid, stride);
  const Tensor cls = classification_loss(response, targets, config);
  const Tensor reg = regression_loss(boxes, targets);
  LossBreakdown out;
  out.cls = cls.item();
  out.reg = reg.item();
  out.total = add(scale(cls, static_cast<Scalar>(config.cls_weight)),
                  scale(reg, static_cast<Scalar>(config.reg_weight)));
  return out;
}

LossBreakdown compute_loss(const ResponseMap& response, const BBox& gt, std::size_t stride,
                           const LossConfig& config) {
  return compute_loss(response, prepare_targets(response, gt, stride, config), stride, config);
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
