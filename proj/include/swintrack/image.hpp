#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace swintrack {

// Interleaved RGB image with float channels, nominally in [0, 1].
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<float> pixels;  // height * width * 3, row-major

  Image() = default;
  Image(std::size_t w, std::size_t h, float fill = 0.0f) : width(w), height(h), pixels(w * h * 3, fill) {}

  float& at(std::size_t x, std::size_t y, std::size_t c) { return pixels[(y * width + x) * 3 + c]; }
  float at(std::size_t x, std::size_t y, std::size_t c) const { return pixels[(y * width + x) * 3 + c]; }
  bool empty() const { return pixels.empty(); }
  std::array<float, 3> channel_mean() const;

  friend bool operator==(const Image&, const Image&) = default;
};

// Builds an image from 8-bit interleaved RGB, scaling to [0, 1].
Image image_from_u8(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height,
                    std::size_t channels = 3);
std::vector<std::uint8_t> image_to_u8(const Image& image);

// Samples the axis-aligned square window [x0, x0 + side) x [y0, y0 + side)
// of `src` into an out_size x out_size image with bilinear interpolation.
// Samples outside the frame take `fill`.
Image resample_window(const Image& src, double x0, double y0, double side, std::size_t out_size,
                      const std::array<float, 3>& fill);

}  // namespace swintrack
