#include "swintrack/backbone.hpp"

#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

PatchEmbedBackbone::PatchEmbedBackbone(ParameterSet& params, const std::string& prefix,
                                       BackboneConfig config, Rng& rng)
    : config_(config) {
  if (config_.stride == 0) throw std::invalid_argument("backbone stride must be positive");
  const AttentionConfig attn{config_.d_model, config_.n_heads};
  attn.validate();
  const std::size_t d = config_.d_model;
  patch_embed_ = Linear::create(params, prefix + ".patch_embed", 3 * config_.stride * config_.stride, d, rng);
  for (std::size_t b = 0; b < config_.depth; ++b) {
    const std::string base = prefix + ".block" + std::to_string(b);
    blocks_.push_back(EncoderBlock{LayerNormParams::create(params, base + ".norm1", d),
                                   LayerNormParams::create(params, base + ".norm2", d),
                                   AttentionWeights::create(params, base + ".attn", attn, rng),
                                   FeedForward::create(params, base + ".ffn", d, 4 * d, rng)});
  }
}

Tensor PatchEmbedBackbone::patchify(const Image& crop) const {
  const std::size_t s = config_.stride;
  if (crop.width == 0 || crop.height == 0 || crop.width % s != 0 || crop.height % s != 0) {
    throw std::invalid_argument("crop " + std::to_string(crop.width) + "x" +
                                std::to_string(crop.height) + " is not divisible by stride " +
                                std::to_string(s));
  }
  const std::size_t rows = crop.height / s, cols = crop.width / s;
  const std::size_t features = 3 * s * s;
  std::vector<Scalar> values(rows * cols * features);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      Scalar* dst = values.data() + (r * cols + c) * features;
      for (std::size_t py = 0; py < s; ++py) {
        for (std::size_t px = 0; px < s; ++px) {
          for (std::size_t ch = 0; ch < 3; ++ch) {
            *dst++ = static_cast<Scalar>(crop.at(c * s + px, r * s + py, ch));
          }
        }
      }
    }
  }
  return Tensor({rows * cols, features}, std::move(values));
}

Tensor PatchEmbedBackbone::embed_patches(const Image& crop) const {
  return patch_embed_(patchify(crop));
}

TokenSet PatchEmbedBackbone::extract(const Image& crop, SourceKind source) const {
  const GridShape grid{crop.height / config_.stride, crop.width / config_.stride};
  Tensor tokens = add(embed_patches(crop), sinusoidal_pe(grid, config_.d_model));
  const AttentionConfig attn{config_.d_model, config_.n_heads};
  for (const EncoderBlock& block : blocks_) {
    const Tensor normed = block.norm1(tokens);
    tokens = add(tokens, multi_head_attention(normed, normed, normed, block.attn, attn));
    tokens = add(tokens, block.ffn(block.norm2(tokens)));
  }
  return TokenSet{tokens, SourceTag{source, grid}};
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
