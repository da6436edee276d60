#include "swintrack/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

AttentionWeights AttentionWeights::create(ParameterSet& params, const std::string& prefix,
                                          const AttentionConfig& config, Rng& rng) {
  config.validate();
  const std::size_t d = config.d_model;
  return AttentionWeights{Linear::create(params, prefix + ".wq", d, d, rng),
                          Linear::create(params, prefix + ".wk", d, d, rng),
                          Linear::create(params, prefix + ".wv", d, d, rng),
                          Linear::create(params, prefix + ".wo", d, d, rng)};
}

Scalar content_logit_scale(const AttentionConfig& config, bool with_bias) {
  const double d = static_cast<double>(config.d_head());
  return static_cast<Scalar>(1.0 / std::sqrt(with_bias ? 2.0 * d : d));
}

namespace {

void check_tokens(const Tensor& t, const AttentionConfig& config, const char* role) {
  if (t.rank() != 2 || t.dim(1) != config.d_model) {
    throw DimensionError(std::string("attention: ") + role + " tokens " + shape_string(t.shape()) +
                         " do not have " + std::to_string(config.d_model) + " channels");
  }
}

}  // namespace

Tensor attention_logits(const Tensor& q_tokens, const Tensor& k_tokens,
                        const AttentionWeights& weights, const AttentionConfig& config,
                        std::size_t head, Scalar scale) {
  config.validate();
  check_tokens(q_tokens, config, "query");
  check_tokens(k_tokens, config, "key");
  if (head >= config.n_heads) throw std::out_of_range("head index " + std::to_string(head));
  const std::size_t dh = config.d_head();
  const Tensor q = slice_cols(weights.wq(q_tokens), head * dh, dh);
  const Tensor k = slice_cols(weights.wk(k_tokens), head * dh, dh);
  return ::swintrack::scale(matmul_nt(q, k), scale);
}

Tensor multi_head_attention(const Tensor& q_tokens, const Tensor& k_tokens, const Tensor& v_tokens,
                            const AttentionWeights& weights, const AttentionConfig& config,
                            const AttentionLogitBias* bias, AttentionRecorder* recorder) {
  config.validate();
  check_tokens(q_tokens, config, "query");
  check_tokens(k_tokens, config, "key");
  check_tokens(v_tokens, config, "value");
  if (k_tokens.dim(0) != v_tokens.dim(0)) {
    throw DimensionError("attention: key length " + std::to_string(k_tokens.dim(0)) +
                         " differs from value length " + std::to_string(v_tokens.dim(0)));
  }
  const std::size_t lq = q_tokens.dim(0), lk = k_tokens.dim(0);
  if (bias != nullptr) {
    if (bias->heads.size() != config.n_heads) {
      throw DimensionError("attention bias has " + std::to_string(bias->heads.size()) +
                           " heads, expected " + std::to_string(config.n_heads));
    }
    for (const Tensor& b : bias->heads) {
      if (b.shape() != Shape{lq, lk}) {
        throw DimensionError("attention bias " + shape_string(b.shape()) + " does not match " +
                             shape_string(Shape{lq, lk}));
      }
    }
  }

  const std::size_t dh = config.d_head();
  const Scalar logit_scale = content_logit_scale(config, bias != nullptr);
  const Tensor q = weights.wq(q_tokens);
  const Tensor k = weights.wk(k_tokens);
  const Tensor v = weights.wv(v_tokens);

  std::vector<Tensor> heads;
  heads.reserve(config.n_heads);
  for (std::size_t h = 0; h < config.n_heads; ++h) {
    Tensor logits = scale(matmul_nt(slice_cols(q, h * dh, dh), slice_cols(k, h * dh, dh)), logit_scale);
    if (bias != nullptr) logits = add(logits, bias->heads[h]);
    const Tensor attn = softmax(logits, 1);
    if (recorder != nullptr) {
      recorder->maps.emplace_back(recorder->scope + ".head" + std::to_string(h), detach(attn));
    }
    heads.push_back(matmul(attn, slice_cols(v, h * dh, dh)));
  }
  const Tensor merged = config.n_heads == 1 ? heads.front() : concat_cols(heads);
  return weights.wo(merged);
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
