#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swintrack/positional_encoding.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Pre-norm block applied to the concatenated template/search sequence.
struct EncoderBlock {
  LayerNormParams norm1, norm2;
  AttentionWeights attn;
  FeedForward ffn;
};

// Block of the cross-attention fusion variant: separate weights per branch.
struct CrossEncoderBlock {
  LayerNormParams self_norm_z, self_norm_x;
  AttentionWeights self_attn_z, self_attn_x;
  LayerNormParams cross_norm_z, cross_norm_x;
  AttentionWeights cross_attn_z, cross_attn_x;
  LayerNormParams ffn_norm_z, ffn_norm_x;
  FeedForward ffn_z, ffn_x;
};

struct DecoderBlock {
  LayerNormParams norm_query, norm_memory, norm_ffn;
  AttentionWeights cross_attn;
  FeedForward ffn;
};

// Transformer feature fusion: an encoder over template and search tokens
// followed by a single cross-attention decoder that emits the search-side
// feature map.
class FeatureFusion {
 public:
  FeatureFusion(ParameterSet& params, const std::string& prefix, FusionConfig config,
                GridShape template_grid, GridShape search_grid, Rng& rng);

  // Runs the configured encoder variant.
  std::pair<TokenSet, TokenSet> encode(const TokenSet& z, const TokenSet& x,
                                       AttentionRecorder* recorder = nullptr) const;
  // Concatenation fusion: U = Concat(z, x); U += MSA(LN(U)); U += FFN(LN(U))
  // per block with the untied bias in every MSA; then DeConcat.
  std::pair<TokenSet, TokenSet> encode_concat(const TokenSet& z, const TokenSet& x,
                                              AttentionRecorder* recorder = nullptr) const;
  // Cross-attention fusion: per block, self-attention within each branch,
  // then cross-attention from each branch to the other, then per-branch FFNs.
  std::pair<TokenSet, TokenSet> encode_cross_variant(const TokenSet& z, const TokenSet& x,
                                                     AttentionRecorder* recorder = nullptr) const;
  // x += MCA(LN(x), LN(Concat(z, x))); x += FFN(LN(x)). Returns [search tokens, d_model].
  Tensor decode(const TokenSet& z_out, const TokenSet& x_out,
                AttentionRecorder* recorder = nullptr) const;

  const FusionConfig& config() const { return config_; }
  const std::vector<EncoderBlock>& encoder_blocks() const { return blocks_; }
  std::vector<EncoderBlock>& encoder_blocks() { return blocks_; }
  std::vector<CrossEncoderBlock>& cross_blocks() { return cross_blocks_; }
  DecoderBlock& decoder() { return decoder_; }
  UntiedPositionalEncoding* encoder_pe() { return encoder_pe_ ? &*encoder_pe_ : nullptr; }
  UntiedPositionalEncoding* decoder_pe() { return decoder_pe_ ? &*decoder_pe_ : nullptr; }

 private:
  void check_inputs(const TokenSet& z, const TokenSet& x) const;
  // Applies the sine embedding at the fusion input when that mode is active.
  Tensor with_input_pe(const TokenSet& t) const;
  std::optional<AttentionLogitBias> encoder_bias(std::span<const SourceKind> q,
                                                 std::span<const SourceKind> k) const;

  FusionConfig config_;
  GridShape template_grid_, search_grid_;
  std::vector<EncoderBlock> blocks_;
  std::vector<CrossEncoderBlock> cross_blocks_;
  DecoderBlock decoder_;
  std::optional<UntiedPositionalEncoding> encoder_pe_;
  std::optional<UntiedPositionalEncoding> decoder_pe_;
};

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
