#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swintrack/config.hpp"
#include "swintrack/layers.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Additive pre-softmax logits, one [L_q, L_k] matrix per head.
struct AttentionLogitBias {
  std::vector<Tensor> heads;
};

struct AttentionWeights {
  Linear wq, wk, wv, wo;

  static AttentionWeights create(ParameterSet& params, const std::string& prefix,
                                 const AttentionConfig& config, Rng& rng);
};

// Receives post-softmax attention maps when supplied to multi_head_attention.
struct AttentionRecorder {
  std::string scope;
  std::vector<std::pair<std::string, Tensor>> maps;  // (label, [L_q, L_k]) per head
};

// Scale applied to content logits: 1/sqrt(2 d_head) when a positional bias
// is added (content and position terms share the budget), 1/sqrt(d_head)
// otherwise.
Scalar content_logit_scale(const AttentionConfig& config, bool with_bias);

// Pre-softmax content logits of one head, multiplied by `scale`.
Tensor attention_logits(const Tensor& q_tokens, const Tensor& k_tokens,
                        const AttentionWeights& weights, const AttentionConfig& config,
                        std::size_t head, Scalar scale);

// Multi-head attention over [L, d_model] token matrices. Queries come from
// `q_tokens`, keys and values from `k_tokens` / `v_tokens`.
Tensor multi_head_attention(const Tensor& q_tokens, const Tensor& k_tokens, const Tensor& v_tokens,
                            const AttentionWeights& weights, const AttentionConfig& config,
                            const AttentionLogitBias* bias = nullptr,
                            AttentionRecorder* recorder = nullptr);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
