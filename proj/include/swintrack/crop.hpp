#pragma once

#include <utility>
#include <vector>

#include "swintrack/bbox.hpp"
#include "swintrack/image.hpp"
#include "swintrack/tokens.hpp"

namespace swintrack {

// Square window of a frame resampled to out_size x out_size. Maps between
// frame and crop coordinates: frame = origin + crop * scale().
struct CropSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double side = 0.0;  // window side in frame pixels
  std::size_t out_size = 0;
  double area_factor = 0.0;

  double scale() const { return side / static_cast<double>(out_size); }
  double origin_x() const { return center_x - 0.5 * side; }
  double origin_y() const { return center_y - 0.5 * side; }

  std::pair<double, double> to_frame(double u, double v) const {
    return {origin_x() + u * scale(), origin_y() + v * scale()};
  }
  std::pair<double, double> to_crop(double x, double y) const {
    return {(x - origin_x()) / scale(), (y - origin_y()) / scale()};
  }
  BBox box_to_frame(const BBox& b) const;
  BBox box_to_crop(const BBox& b) const;
};

// Window side for a target: sqrt(w * h) * area_factor.
double crop_side(const BBox& target, double area_factor);

// Crop centred on `center` with the given side; out-of-frame samples take the
// frame's channel mean.
std::pair<Image, CropSpec> crop_window(const Image& frame, double center_x, double center_y,
                                       double side, std::size_t out_size, double area_factor);

// Square crop centred on the target with side sqrt(w * h) * area_factor.
// Throws std::invalid_argument for a degenerate target.
std::pair<Image, CropSpec> make_crop(const Image& frame, const BBox& target, double area_factor,
                                     std::size_t out_size);

// Outer product of two Hann windows 0.5 (1 - cos(2 pi n / (N - 1))); a
// length-1 axis has weight 1. Row-major over the grid.
std::vector<double> hanning_window(GridShape grid);

// (1 - gamma) * scores + gamma * window. Throws for gamma outside [0, 1].
std::vector<double> hanning_penalty(std::span<const double> scores, GridShape grid, double gamma);

}  // namespace swintrack
