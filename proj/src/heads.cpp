#include "swintrack/heads.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

ThreeLayerPerceptron ThreeLayerPerceptron::create(ParameterSet& params, const std::string& prefix,
                                                  std::size_t channels, std::size_t out, Rng& rng) {
  // Not residual, so 0.02 would shrink the signal at every layer when channels is small.
  const double he = std::sqrt(2.0 / static_cast<double>(channels));
  return ThreeLayerPerceptron{Linear::create(params, prefix + ".fc1", channels, channels, rng, he),
                              Linear::create(params, prefix + ".fc2", channels, channels, rng, he),
                              Linear::create(params, prefix + ".fc3", channels, out, rng, he / std::sqrt(2.0))};
}

PredictionHead::PredictionHead(ParameterSet& params, const std::string& prefix, std::size_t d_model,
                               Rng& rng)
    : d_model_(d_model),
      cls_(ThreeLayerPerceptron::create(params, prefix + ".cls", d_model, 1, rng)),
      reg_(ThreeLayerPerceptron::create(params, prefix + ".reg", d_model, 4, rng)) {}

ResponseMap PredictionHead::forward(const Tensor& features, GridShape grid) const {
  if (features.rank() != 2 || features.dim(1) != d_model_ || features.dim(0) != grid.size()) {
    throw DimensionError("head: features " + shape_string(features.shape()) + " do not match a " +
                         std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + "x" +
                         std::to_string(d_model_) + " map");
  }
  ResponseMap out;
  out.cls_logits = cls_(features);
  out.cls = sigmoid(out.cls_logits);
  out.reg = sigmoid(reg_(features));
  out.grid = grid;
  return out;
}

std::array<double, 2> cell_center(std::size_t index, GridShape grid, std::size_t stride) {
  if (index >= grid.size()) throw std::out_of_range("cell index " + std::to_string(index));
  const double s = static_cast<double>(stride);
  return {(static_cast<double>(index % grid.cols) + 0.5) * s,
          (static_cast<double>(index / grid.cols) + 0.5) * s};
}

BBox decode_box(std::size_t index, std::span<const Scalar> distances, GridShape grid, std::size_t stride) {
  if (distances.size() != 4) throw std::invalid_argument("decode_box needs 4 distances");
  const auto [cx, cy] = cell_center(index, grid, stride);
  const double width = static_cast<double>(grid.cols * stride);
  const double height = static_cast<double>(grid.rows * stride);
  const double l = distances[0] * width, t = distances[1] * height;
  const double r = distances[2] * width, b = distances[3] * height;
  return BBox{cx - l, cy - t, std::max(1.0, l + r), std::max(1.0, t + b)};
}

std::array<double, 4> encode_box(std::size_t index, const BBox& box, GridShape grid, std::size_t stride) {
  const auto [cx, cy] = cell_center(index, grid, stride);
  const double width = static_cast<double>(grid.cols * stride);
  const double height = static_cast<double>(grid.rows * stride);
  return {(cx - box.x) / width, (cy - box.y) / height, (box.right() - cx) / width,
          (box.bottom() - cy) / height};
}

Tensor decode_boxes(const Tensor& reg, GridShape grid, std::size_t stride) {
  if (reg.rank() != 2 || reg.dim(1) != 4 || reg.dim(0) != grid.size()) {
    throw DimensionError("decode_boxes: regression map " + shape_string(reg.shape()));
  }
  const Scalar width = static_cast<Scalar>(grid.cols * stride);
  const Scalar height = static_cast<Scalar>(grid.rows * stride);
  std::vector<Scalar> anchors(grid.size() * 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [cx, cy] = cell_center(i, grid, stride);
    anchors[i * 4 + 0] = static_cast<Scalar>(cx);
    anchors[i * 4 + 1] = static_cast<Scalar>(cy);
    anchors[i * 4 + 2] = static_cast<Scalar>(cx);
    anchors[i * 4 + 3] = static_cast<Scalar>(cy);
  }
  const Tensor signs({4}, {-width, -height, width, height});
  return add(mul(reg, signs), Tensor({grid.size(), 4}, std::move(anchors)));
}

std::vector<BBox> decode_all(const ResponseMap& response, std::size_t stride) {
  std::vector<BBox> boxes;
  boxes.reserve(response.grid.size());
  const auto reg = response.reg.data();
  for (std::size_t i = 0; i < response.grid.size(); ++i) {
    boxes.push_back(decode_box(i, reg.subspan(i * 4, 4), response.grid, stride));
  }
  return boxes;
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
