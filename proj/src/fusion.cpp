#include "swintrack/fusion.hpp"

#include <array>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace {

constexpr std::array<SourceKind, 2> kConcatLayout = {SourceKind::kTemplate, SourceKind::kSearch};
constexpr std::array<SourceKind, 1> kTemplateOnly = {SourceKind::kTemplate};
constexpr std::array<SourceKind, 1> kSearchOnly = {SourceKind::kSearch};

void set_scope(AttentionRecorder* recorder, std::string scope) {
  if (recorder != nullptr) recorder->scope = std::move(scope);
}

}  // namespace

FeatureFusion::FeatureFusion(ParameterSet& params, const std::string& prefix, FusionConfig config,
                             GridShape template_grid, GridShape search_grid, Rng& rng)
    : config_(config), template_grid_(template_grid), search_grid_(search_grid) {
  const AttentionConfig attn = config_.attention();
  attn.validate();
  const std::size_t d = config_.d_model;
  const std::size_t hidden = config_.ffn_hidden();

  if (config_.pe_mode == PeMode::kUntied) {
    encoder_pe_.emplace(params, prefix + ".encoder.pe", attn, template_grid, search_grid,
                        std::vector<SourceKind>(kConcatLayout.begin(), kConcatLayout.end()), rng);
  }
  for (std::size_t b = 0; b < config_.blocks; ++b) {
    const std::string base = prefix + ".encoder.block" + std::to_string(b);
    if (config_.fusion_mode == FusionMode::kConcat) {
      EncoderBlock block{LayerNormParams::create(params, base + ".norm1", d),
                         LayerNormParams::create(params, base + ".norm2", d),
                         AttentionWeights::create(params, base + ".attn", attn, rng),
                         FeedForward::create(params, base + ".ffn", d, hidden, rng)};
      blocks_.push_back(std::move(block));
    } else {
      CrossEncoderBlock block{
          LayerNormParams::create(params, base + ".self_norm_z", d),
          LayerNormParams::create(params, base + ".self_norm_x", d),
          AttentionWeights::create(params, base + ".self_attn_z", attn, rng),
          AttentionWeights::create(params, base + ".self_attn_x", attn, rng),
          LayerNormParams::create(params, base + ".cross_norm_z", d),
          LayerNormParams::create(params, base + ".cross_norm_x", d),
          AttentionWeights::create(params, base + ".cross_attn_z", attn, rng),
          AttentionWeights::create(params, base + ".cross_attn_x", attn, rng),
          LayerNormParams::create(params, base + ".ffn_norm_z", d),
          LayerNormParams::create(params, base + ".ffn_norm_x", d),
          FeedForward::create(params, base + ".ffn_z", d, hidden, rng),
          FeedForward::create(params, base + ".ffn_x", d, hidden, rng)};
      cross_blocks_.push_back(std::move(block));
    }
  }

  if (config_.pe_mode == PeMode::kUntied) {
    decoder_pe_.emplace(params, prefix + ".decoder.pe", attn, template_grid, search_grid,
                        std::vector<SourceKind>{SourceKind::kSearch}, rng);
  }
  const std::string base = prefix + ".decoder";
  decoder_ = DecoderBlock{LayerNormParams::create(params, base + ".norm_query", d),
                          LayerNormParams::create(params, base + ".norm_memory", d),
                          LayerNormParams::create(params, base + ".norm_ffn", d),
                          AttentionWeights::create(params, base + ".cross_attn", attn, rng),
                          FeedForward::create(params, base + ".ffn", d, hidden, rng)};
}

void FeatureFusion::check_inputs(const TokenSet& z, const TokenSet& x) const {
  for (const TokenSet* t : {&z, &x}) {
    if (t->tokens.rank() != 2 || t->tokens.dim(1) != config_.d_model) {
      throw DimensionError("fusion: " + std::string(source_name(t->tag.kind)) + " tokens " +
                           shape_string(t->tokens.shape()) + " do not have " +
                           std::to_string(config_.d_model) + " channels");
    }
    if (t->tokens.dim(0) != t->tag.tokens()) {
      throw DimensionError("fusion: token count " + std::to_string(t->tokens.dim(0)) +
                           " does not match grid " + std::to_string(t->tag.grid.rows) + "x" +
                           std::to_string(t->tag.grid.cols));
    }
  }
  if (z.tag.grid != template_grid_ || x.tag.grid != search_grid_) {
    throw DimensionError("fusion: token grids do not match the configured template/search grids");
  }
}

Tensor FeatureFusion::with_input_pe(const TokenSet& t) const {
  if (config_.pe_mode != PeMode::kSine) return t.tokens;
  return add(t.tokens, sinusoidal_pe(t.tag.grid, config_.d_model));
}

std::optional<AttentionLogitBias> FeatureFusion::encoder_bias(std::span<const SourceKind> q,
                                                              std::span<const SourceKind> k) const {
  if (!encoder_pe_) return std::nullopt;
  return encoder_pe_->fusion_bias(q, k);
}

std::pair<TokenSet, TokenSet> FeatureFusion::encode(const TokenSet& z, const TokenSet& x,
                                                    AttentionRecorder* recorder) const {
  return config_.fusion_mode == FusionMode::kConcat ? encode_concat(z, x, recorder)
                                                    : encode_cross_variant(z, x, recorder);
}

std::pair<TokenSet, TokenSet> FeatureFusion::encode_concat(const TokenSet& z, const TokenSet& x,
                                                           AttentionRecorder* recorder) const {
  check_inputs(z, x);
  if (config_.fusion_mode != FusionMode::kConcat) {
    throw std::logic_error("encode_concat called on a cross-fusion model");
  }
  const std::size_t lz = z.tag.tokens(), lx = x.tag.tokens();
  const std::array<Tensor, 2> parts = {with_input_pe(z), with_input_pe(x)};
  Tensor u = concat_rows(parts);

  // One bias, computed once, shared by every block.
  const auto bias = encoder_bias(kConcatLayout, kConcatLayout);
  const AttentionConfig attn = config_.attention();
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const EncoderBlock& block = blocks_[b];
    set_scope(recorder, "encoder.block" + std::to_string(b));
    const Tensor normed = block.norm1(u);
    u = add(u, multi_head_attention(normed, normed, normed, block.attn, attn,
                                    bias ? &*bias : nullptr, recorder));
    u = add(u, block.ffn(block.norm2(u)));
  }
  if (blocks_.empty()) return {TokenSet{parts[0], z.tag}, TokenSet{parts[1], x.tag}};
  return {TokenSet{slice_rows(u, 0, lz), z.tag}, TokenSet{slice_rows(u, lz, lx), x.tag}};
}

std::pair<TokenSet, TokenSet> FeatureFusion::encode_cross_variant(const TokenSet& z,
                                                                  const TokenSet& x,
                                                                  AttentionRecorder* recorder) const {
  check_inputs(z, x);
  if (config_.fusion_mode != FusionMode::kCross) {
    throw std::logic_error("encode_cross_variant called on a concat-fusion model");
  }
  Tensor zt = with_input_pe(z);
  Tensor xt = with_input_pe(x);
  const auto bias_zz = encoder_bias(kTemplateOnly, kTemplateOnly);
  const auto bias_xx = encoder_bias(kSearchOnly, kSearchOnly);
  const auto bias_zx = encoder_bias(kTemplateOnly, kSearchOnly);
  const auto bias_xz = encoder_bias(kSearchOnly, kTemplateOnly);
  auto ptr = [](const std::optional<AttentionLogitBias>& b) { return b ? &*b : nullptr; };

  const AttentionConfig attn = config_.attention();
  for (std::size_t b = 0; b < cross_blocks_.size(); ++b) {
    const CrossEncoderBlock& block = cross_blocks_[b];
    const std::string scope = "encoder.block" + std::to_string(b);
    set_scope(recorder, scope + ".self_z");
    const Tensor nz = block.self_norm_z(zt);
    zt = add(zt, multi_head_attention(nz, nz, nz, block.self_attn_z, attn, ptr(bias_zz), recorder));
    set_scope(recorder, scope + ".self_x");
    const Tensor nx = block.self_norm_x(xt);
    xt = add(xt, multi_head_attention(nx, nx, nx, block.self_attn_x, attn, ptr(bias_xx), recorder));

    const Tensor cz = block.cross_norm_z(zt);
    const Tensor cx = block.cross_norm_x(xt);
    set_scope(recorder, scope + ".cross_z");
    const Tensor z_update = multi_head_attention(cz, cx, cx, block.cross_attn_z, attn, ptr(bias_zx), recorder);
    set_scope(recorder, scope + ".cross_x");
    const Tensor x_update = multi_head_attention(cx, cz, cz, block.cross_attn_x, attn, ptr(bias_xz), recorder);
    zt = add(zt, z_update);
    xt = add(xt, x_update);

    zt = add(zt, block.ffn_z(block.ffn_norm_z(zt)));
    xt = add(xt, block.ffn_x(block.ffn_norm_x(xt)));
  }
  return {TokenSet{zt, z.tag}, TokenSet{xt, x.tag}};
}

Tensor FeatureFusion::decode(const TokenSet& z_out, const TokenSet& x_out,
                             AttentionRecorder* recorder) const {
  check_inputs(z_out, x_out);
  const DecoderBlock& dec = decoder_;
  const Tensor x = x_out.tokens;
  const std::array<Tensor, 2> parts = {z_out.tokens, x};
  const Tensor memory = dec.norm_memory(concat_rows(parts));

  std::optional<AttentionLogitBias> bias;
  if (decoder_pe_) bias = decoder_pe_->fusion_bias(kSearchOnly, kConcatLayout);
  set_scope(recorder, "decoder");
  const Tensor attended = add(x, multi_head_attention(dec.norm_query(x), memory, memory,
                                                      dec.cross_attn, config_.attention(),
                                                      bias ? &*bias : nullptr, recorder));
  return add(attended, dec.ffn(dec.norm_ffn(attended)));
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
