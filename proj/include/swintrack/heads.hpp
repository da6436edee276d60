#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "swintrack/bbox.hpp"
#include "swintrack/layers.hpp"
#include "swintrack/tokens.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Dense predictions over the search grid.
struct ResponseMap {
  Tensor cls_logits;  // [N, 1]
  Tensor cls;         // [N, 1], sigmoid of cls_logits
  Tensor reg;         // [N, 4], (l, t, r, b) edge distances divided by the crop side
  GridShape grid;
};

struct ThreeLayerPerceptron {
  Linear fc1, fc2, fc3;

  static ThreeLayerPerceptron create(ParameterSet& params, const std::string& prefix,
                                     std::size_t channels, std::size_t out, Rng& rng);
  Tensor operator()(const Tensor& x) const { return fc3(gelu(fc2(gelu(fc1(x))))); }
};

// Classification and box-regression branches, each a three-layer
// perceptron with hidden width d_model.
class PredictionHead {
 public:
  PredictionHead(ParameterSet& params, const std::string& prefix, std::size_t d_model, Rng& rng);

  ResponseMap forward(const Tensor& features, GridShape grid) const;

  ThreeLayerPerceptron& classifier() { return cls_; }
  ThreeLayerPerceptron& regressor() { return reg_; }

 private:
  std::size_t d_model_;
  ThreeLayerPerceptron cls_;
  ThreeLayerPerceptron reg_;
};

// Centre of grid cell `index` in crop pixels.
std::array<double, 2> cell_center(std::size_t index, GridShape grid, std::size_t stride);

// Box predicted at `index` from its normalised (l, t, r, b) distances, in
// crop pixels. Width and height are clamped to at least one pixel.
BBox decode_box(std::size_t index, std::span<const Scalar> distances, GridShape grid, std::size_t stride);
// Inverse of decode_box: normalised distances that reproduce `box` from `index`.
std::array<double, 4> encode_box(std::size_t index, const BBox& box, GridShape grid, std::size_t stride);

// Differentiable corner form [N, 4] = (x1, y1, x2, y2) of every cell's box.
Tensor decode_boxes(const Tensor& reg, GridShape grid, std::size_t stride);
// Value-only decode of every cell.
std::vector<BBox> decode_all(const ResponseMap& response, std::size_t stride);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
