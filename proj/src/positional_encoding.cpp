#include "swintrack/positional_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace {

std::string kind_label(SourceKind kind) { return std::string(source_name(kind)); }

void check_kind(SourceKind kind) {
  if (kind != SourceKind::kTemplate && kind != SourceKind::kSearch) {
    throw std::invalid_argument("unknown source tag " + std::to_string(static_cast<int>(kind)));
  }
}

}  // namespace

UntiedPositionalEncoding::UntiedPositionalEncoding(ParameterSet& params, const std::string& prefix,
                                                   const AttentionConfig& config,
                                                   GridShape template_grid, GridShape search_grid,
                                                   std::vector<SourceKind> query_sources, Rng& rng)
    : config_(config),
      template_grid_(template_grid),
      search_grid_(search_grid),
      query_sources_(std::move(query_sources)) {
  config_.validate();
  if (template_grid.size() == 0 || search_grid.size() == 0) {
    throw std::invalid_argument("positional encoding needs non-empty grids");
  }
  const std::size_t d = config_.d_model;
  for (SourceKind kind : {SourceKind::kTemplate, SourceKind::kSearch}) {
    const GridShape g = grid(kind);
    const std::string base = prefix + "." + kind_label(kind);
    SourceParams sp;
    sp.rows = params.add_normal(base + ".row_embedding", {g.rows, d}, rng, kPositionEmbeddingStddev);
    sp.cols = params.add_normal(base + ".col_embedding", {g.cols, d}, rng, kPositionEmbeddingStddev);
    if (has_query(kind)) {
      sp.uq = params.add_truncated_normal(base + ".query_projection", {d, d}, rng, kInitStddev);
    }
    sp.uk = params.add_truncated_normal(base + ".key_projection", {d, d}, rng, kInitStddev);
    sources_.emplace(kind, std::move(sp));
  }
  for (SourceKind q : query_sources_) {
    check_kind(q);
    for (SourceKind k : {SourceKind::kTemplate, SourceKind::kSearch}) {
      const GridShape gq = grid(q), gk = grid(k);
      bias_tables_.emplace(
          std::pair{q, k},
          params.add_zeros(prefix + ".relative_bias." + kind_label(q) + "_to_" + kind_label(k),
                           {config_.n_heads, gq.rows + gk.rows - 1, gq.cols + gk.cols - 1}));
    }
  }
}

GridShape UntiedPositionalEncoding::grid(SourceKind kind) const {
  check_kind(kind);
  return kind == SourceKind::kTemplate ? template_grid_ : search_grid_;
}

bool UntiedPositionalEncoding::has_query(SourceKind kind) const {
  return std::find(query_sources_.begin(), query_sources_.end(), kind) != query_sources_.end();
}

const UntiedPositionalEncoding::SourceParams& UntiedPositionalEncoding::source(SourceKind kind) const {
  check_kind(kind);
  return sources_.at(kind);
}

Tensor& UntiedPositionalEncoding::row_embedding(SourceKind kind) {
  check_kind(kind);
  return sources_.at(kind).rows;
}

Tensor& UntiedPositionalEncoding::col_embedding(SourceKind kind) {
  check_kind(kind);
  return sources_.at(kind).cols;
}

Tensor& UntiedPositionalEncoding::query_projection(SourceKind kind) {
  if (!has_query(kind)) {
    throw std::invalid_argument(kind_label(kind) + " is not a query source of this encoding");
  }
  return sources_.at(kind).uq;
}

Tensor& UntiedPositionalEncoding::key_projection(SourceKind kind) {
  check_kind(kind);
  return sources_.at(kind).uk;
}

Tensor& UntiedPositionalEncoding::bias_table(SourceKind query, SourceKind key) {
  check_kind(key);
  auto it = bias_tables_.find({query, key});
  if (it == bias_tables_.end()) {
    throw std::invalid_argument(kind_label(query) + " is not a query source of this encoding");
  }
  return it->second;
}

Tensor UntiedPositionalEncoding::position_vectors(SourceKind kind) const {
  const GridShape g = grid(kind);
  std::vector<std::size_t> row_index(g.size()), col_index(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) {
    row_index[t] = t / g.cols;
    col_index[t] = t % g.cols;
  }
  const SourceParams& sp = source(kind);
  return add(gather_rows(sp.rows, row_index), gather_rows(sp.cols, col_index));
}

Tensor UntiedPositionalEncoding::untied_abs_term(SourceKind query, SourceKind key,
                                                 std::size_t head) const {
  if (!has_query(query)) {
    throw std::invalid_argument(kind_label(query) + " is not a query source of this encoding");
  }
  if (head >= config_.n_heads) throw std::out_of_range("head index " + std::to_string(head));
  const std::size_t dh = config_.d_head();
  const Tensor pq = matmul(position_vectors(query), slice_cols(source(query).uq, head * dh, dh));
  const Tensor pk = matmul(position_vectors(key), slice_cols(source(key).uk, head * dh, dh));
  return scale(matmul_nt(pq, pk), static_cast<Scalar>(1.0 / std::sqrt(2.0 * static_cast<double>(dh))));
}

Tensor UntiedPositionalEncoding::relative_bias_term(SourceKind query, SourceKind key,
                                                    std::size_t head) const {
  auto it = bias_tables_.find({query, key});
  if (it == bias_tables_.end()) {
    throw std::invalid_argument(kind_label(query) + " is not a query source of this encoding");
  }
  if (head >= config_.n_heads) throw std::out_of_range("head index " + std::to_string(head));
  const GridShape gq = grid(query), gk = grid(key);
  const std::size_t table_rows = gq.rows + gk.rows - 1;
  const std::size_t table_cols = gq.cols + gk.cols - 1;
  const std::size_t head_offset = head * table_rows * table_cols;

  std::vector<std::size_t> index(gq.size() * gk.size());
  for (std::size_t a = 0; a < gq.size(); ++a) {
    const std::size_t i = a / gq.cols, j = a % gq.cols;
    for (std::size_t b = 0; b < gk.size(); ++b) {
      const std::size_t m = b / gk.cols, n = b % gk.cols;
      // Shifted offsets: (m - i) + rows_q - 1 and (n - j) + cols_q - 1, both >= 0.
      const std::size_t di = m + gq.rows - 1 - i;
      const std::size_t dj = n + gq.cols - 1 - j;
      index[a * gk.size() + b] = head_offset + di * table_cols + dj;
    }
  }
  return gather(it->second, index, {gq.size(), gk.size()});
}

Tensor UntiedPositionalEncoding::fusion_bias(std::span<const SourceKind> query_layout,
                                             std::span<const SourceKind> key_layout,
                                             std::size_t head) const {
  if (query_layout.empty() || key_layout.empty()) {
    throw std::invalid_argument("fusion_bias needs non-empty layouts");
  }
  std::vector<Tensor> bands;
  for (SourceKind q : query_layout) {
    std::vector<Tensor> blocks;
    for (SourceKind k : key_layout) {
      blocks.push_back(add(untied_abs_term(q, k, head), relative_bias_term(q, k, head)));
    }
    bands.push_back(blocks.size() == 1 ? blocks.front() : concat_cols(blocks));
  }
  return bands.size() == 1 ? bands.front() : concat_rows(bands);
}

AttentionLogitBias UntiedPositionalEncoding::fusion_bias(std::span<const SourceKind> query_layout,
                                                         std::span<const SourceKind> key_layout) const {
  AttentionLogitBias bias;
  for (std::size_t h = 0; h < config_.n_heads; ++h) {
    bias.heads.push_back(fusion_bias(query_layout, key_layout, h));
  }
  return bias;
}

Tensor sinusoidal_pe(GridShape grid, std::size_t d_model) {
  if (d_model == 0 || d_model % 2 != 0) {
    throw std::invalid_argument("sinusoidal_pe needs an even d_model, got " + std::to_string(d_model));
  }
  if (grid.size() == 0) throw std::invalid_argument("sinusoidal_pe needs a non-empty grid");
  const std::size_t half = d_model / 2;
  std::vector<Scalar> values(grid.size() * d_model);
  for (std::size_t t = 0; t < grid.size(); ++t) {
    const double pos[2] = {static_cast<double>(t / grid.cols), static_cast<double>(t % grid.cols)};
    for (std::size_t axis = 0; axis < 2; ++axis) {
      for (std::size_t c = 0; c < half; ++c) {
        const double pair = static_cast<double>(c / 2);
        const double angle = pos[axis] / std::pow(10000.0, 2.0 * pair / static_cast<double>(half));
        values[t * d_model + axis * half + c] =
            static_cast<Scalar>(c % 2 == 0 ? std::sin(angle) : std::cos(angle));
      }
    }
  }
  return Tensor({grid.size(), d_model}, std::move(values));
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
