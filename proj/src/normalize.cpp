#include <stdexcept>

#include "swintrack/backbone.hpp"

namespace swintrack {

Image standardize(const Image& image, const NormalizationConstants& constants) {
  Image out = image;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const std::size_t c = i % 3;
    out.pixels[i] = (out.pixels[i] - constants.mean[c]) / constants.stddev[c];
  }
  return out;
}

Image normalize_image(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height,
                      std::size_t channels, const NormalizationConstants& constants) {
  return standardize(image_from_u8(rgb, width, height, channels), constants);
}

}  // namespace swintrack
