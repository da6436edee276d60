#include "swintrack/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swintrack {

std::array<float, 3> Image::channel_mean() const {
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < pixels.size(); ++i) acc[i % 3] += pixels[i];
  const double n = static_cast<double>(std::max<std::size_t>(1, width * height));
  return {static_cast<float>(acc[0] / n), static_cast<float>(acc[1] / n),
          static_cast<float>(acc[2] / n)};
}

Image image_from_u8(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height,
                    std::size_t channels) {
  if (channels != 3) {
    throw std::invalid_argument("expected 3 colour channels, got " + std::to_string(channels));
  }
  if (rgb.size() != width * height * 3) {
    throw std::invalid_argument("pixel buffer size does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  Image image(width, height);
  for (std::size_t i = 0; i < rgb.size(); ++i) image.pixels[i] = static_cast<float>(rgb[i]) / 255.0f;
  return image;
}

std::vector<std::uint8_t> image_to_u8(const Image& image) {
  std::vector<std::uint8_t> out(image.pixels.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.pixels[i], 0.0f, 1.0f) * 255.0f));
  }
  return out;
}

Image resample_window(const Image& src, double x0, double y0, double side, std::size_t out_size,
                      const std::array<float, 3>& fill) {
  if (out_size == 0 || !(side > 0.0)) throw std::invalid_argument("resample_window: empty window");
  Image out(out_size, out_size);
  const double step = side / static_cast<double>(out_size);
  const auto w = static_cast<long>(src.width), h = static_cast<long>(src.height);
  for (std::size_t v = 0; v < out_size; ++v) {
    // Pixel centres map to pixel centres: frame coordinate of output pixel v.
    const double fy = y0 + (static_cast<double>(v) + 0.5) * step - 0.5;
    const double y_floor = std::floor(fy);
    const double wy = fy - y_floor;
    const long y_lo = static_cast<long>(y_floor);
    for (std::size_t u = 0; u < out_size; ++u) {
      const double fx = x0 + (static_cast<double>(u) + 0.5) * step - 0.5;
      const double x_floor = std::floor(fx);
      const double wx = fx - x_floor;
      const long x_lo = static_cast<long>(x_floor);
      for (std::size_t c = 0; c < 3; ++c) {
        auto sample = [&](long xx, long yy) -> double {
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) return fill[c];
          return src.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy), c);
        };
        const double top = (1.0 - wx) * sample(x_lo, y_lo) + wx * sample(x_lo + 1, y_lo);
        const double bottom = (1.0 - wx) * sample(x_lo, y_lo + 1) + wx * sample(x_lo + 1, y_lo + 1);
        out.at(u, v, c) = static_cast<float>((1.0 - wy) * top + wy * bottom);
      }
    }
  }
  return out;
}

}  // namespace swintrack
