#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swintrack/attention.hpp"
#include "swintrack/tokens.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Standard deviation of the initial position embeddings.
inline constexpr double kPositionEmbeddingStddev = 0.02;

// Learnable untied positional encoding for concatenated template/search
// token sequences. Owns, per source, one embedding table per spatial axis
// (shared by all heads) and the query/key projections of every head; per
// (query source, key source) pair, a relative-offset bias table per head.
//
// One instance serves every layer that uses it. The encoder builds one with
// both sources on the query side; the decoder builds a second with search
// queries only.
class UntiedPositionalEncoding {
 public:
  UntiedPositionalEncoding(ParameterSet& params, const std::string& prefix,
                           const AttentionConfig& config, GridShape template_grid,
                           GridShape search_grid, std::vector<SourceKind> query_sources, Rng& rng);

  // [L_q, L_k] term (1/sqrt(2 d_head)) [(p1_i + p2_j) U^Q_g] [(p1_m + p2_n) U^K_h]^T
  // for query source g and key source h.
  Tensor untied_abs_term(SourceKind query, SourceKind key, std::size_t head) const;

  // [L_q, L_k] matrix of b[m - i, n - j] from the (g, h) table of `head`.
  Tensor relative_bias_term(SourceKind query, SourceKind key, std::size_t head) const;

  // Block matrix over the concatenated layouts: block (g, h) holds
  // untied_abs_term + relative_bias_term at the offsets of g and h.
  Tensor fusion_bias(std::span<const SourceKind> query_layout,
                     std::span<const SourceKind> key_layout, std::size_t head) const;
  AttentionLogitBias fusion_bias(std::span<const SourceKind> query_layout,
                                 std::span<const SourceKind> key_layout) const;

  GridShape grid(SourceKind kind) const;
  const AttentionConfig& config() const { return config_; }

  // Parameter handles, exposed for tests and for hand-set experiments.
  Tensor& row_embedding(SourceKind kind);     // [rows, d_model]
  Tensor& col_embedding(SourceKind kind);     // [cols, d_model]
  Tensor& query_projection(SourceKind kind);  // [d_model, d_model], head h owns columns h*d_head..
  Tensor& key_projection(SourceKind kind);
  // [n_heads, rows_g + rows_h - 1, cols_g + cols_h - 1]; entry
  // (head, di + rows_g - 1, dj + cols_g - 1) holds the bias for offset (di, dj) = (m - i, n - j).
  Tensor& bias_table(SourceKind query, SourceKind key);

 private:
  struct SourceParams {
    Tensor rows, cols, uq, uk;
  };
  const SourceParams& source(SourceKind kind) const;
  bool has_query(SourceKind kind) const;
  // [tokens, d_model]: p1_i + p2_j for every grid position, row-major.
  Tensor position_vectors(SourceKind kind) const;

  AttentionConfig config_;
  GridShape template_grid_, search_grid_;
  std::vector<SourceKind> query_sources_;
  std::map<SourceKind, SourceParams> sources_;
  std::map<std::pair<SourceKind, SourceKind>, Tensor> bias_tables_;
};

// Fixed 2-D sinusoidal embedding, [rows * cols, d_model]. The first half of
// the channels encodes the row index, the second half the column index, each
// as interleaved (sin, cos) pairs. Rejects odd d_model.
Tensor sinusoidal_pe(GridShape grid, std::size_t d_model);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
