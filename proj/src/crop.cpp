#include "swintrack/crop.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swintrack {

BBox CropSpec::box_to_frame(const BBox& b) const {
  const auto [x, y] = to_frame(b.x, b.y);
  return {x, y, b.w * scale(), b.h * scale()};
}

BBox CropSpec::box_to_crop(const BBox& b) const {
  const auto [u, v] = to_crop(b.x, b.y);
  return {u, v, b.w / scale(), b.h / scale()};
}

double crop_side(const BBox& target, double area_factor) {
  return std::sqrt(target.w * target.h) * area_factor;
}

std::pair<Image, CropSpec> crop_window(const Image& frame, double center_x, double center_y,
                                       double side, std::size_t out_size, double area_factor) {
  CropSpec spec{center_x, center_y, side, out_size, area_factor};
  Image crop = resample_window(frame, spec.origin_x(), spec.origin_y(), side, out_size,
                               frame.channel_mean());
  return {std::move(crop), spec};
}

std::pair<Image, CropSpec> make_crop(const Image& frame, const BBox& target, double area_factor,
                                     std::size_t out_size) {
  if (!target.valid()) throw std::invalid_argument("make_crop: degenerate target " + to_string(target));
  if (!(area_factor > 0.0)) throw std::invalid_argument("make_crop: area factor must be positive");
  return crop_window(frame, target.cx(), target.cy(), crop_side(target, area_factor), out_size,
                     area_factor);
}

std::vector<double> hanning_window(GridShape grid) {
  auto hann = [](std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n > 1) {
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n - 1)));
      }
    }
    return w;
  };
  const std::vector<double> rows = hann(grid.rows), cols = hann(grid.cols);
  std::vector<double> out(grid.size());
  for (std::size_t r = 0; r < grid.rows; ++r) {
    for (std::size_t c = 0; c < grid.cols; ++c) out[r * grid.cols + c] = rows[r] * cols[c];
  }
  return out;
}

std::vector<double> hanning_penalty(std::span<const double> scores, GridShape grid, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("hanning_penalty: gamma " + std::to_string(gamma) + " outside [0, 1]");
  }
  if (scores.size() != grid.size()) throw std::invalid_argument("hanning_penalty: score map size mismatch");
  const std::vector<double> window = hanning_window(grid);
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - gamma) * scores[i] + gamma * window[i];
  return out;
}

}  // namespace swintrack
