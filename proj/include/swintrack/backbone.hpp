#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swintrack/fusion.hpp"
#include "swintrack/image.hpp"

namespace swintrack {

// Scales 8-bit RGB to [0, 1] and standardises each channel.
Image normalize_image(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height,
                      std::size_t channels, const NormalizationConstants& constants);
// Channel standardisation of a [0, 1] image.
Image standardize(const Image& image, const NormalizationConstants& constants);

}  // namespace swintrack

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Stand-in feature extractor: non-overlapping stride x stride patches are
// linearly embedded, a fixed 2-D sine embedding is added once, then `depth`
// pre-norm transformer blocks run over the patch tokens. The same weights
// serve template and search crops.
class PatchEmbedBackbone {
 public:
  PatchEmbedBackbone(ParameterSet& params, const std::string& prefix, BackboneConfig config, Rng& rng);

  // `crop` is an already standardised image whose sides are multiples of the stride.
  TokenSet extract(const Image& crop, SourceKind source) const;

  // [patches, 3 * stride^2] matrix of raw patch pixels, row-major patch order;
  // within a patch the layout is (row, col, channel).
  Tensor patchify(const Image& crop) const;
  // Patch embedding only, before any positional embedding or block.
  Tensor embed_patches(const Image& crop) const;

  const BackboneConfig& config() const { return config_; }
  Linear& patch_embedding() { return patch_embed_; }

 private:
  BackboneConfig config_;
  Linear patch_embed_;
  std::vector<EncoderBlock> blocks_;
};

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
