#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance checks. Loops only; nothing here calls into the library's math.

#include <cmath>
#include <vector>

#include "swintrack/positional_encoding.hpp"

namespace swintrack::oracles {

// Entry (q=(i,j), k=(m,n)) of the untied position term plus relative bias,
// straight from the per-source parameters.
inline double oracle_entry(UntiedPositionalEncoding& pe, SourceKind g, SourceKind h, std::size_t head,
                           std::size_t i, std::size_t j, std::size_t m, std::size_t n) {
  const std::size_t d = pe.config().d_model, dh = pe.config().d_head();
  const GridShape gq = pe.grid(g), gk = pe.grid(h);
  const Tensor& pr_q = pe.row_embedding(g);
  const Tensor& pc_q = pe.col_embedding(g);
  const Tensor& pr_k = pe.row_embedding(h);
  const Tensor& pc_k = pe.col_embedding(h);
  const Tensor& uq = pe.query_projection(g);
  const Tensor& uk = pe.key_projection(h);
  double dot = 0.0;
  for (std::size_t c = head * dh; c < (head + 1) * dh; ++c) {
    double a = 0.0, b = 0.0;
    for (std::size_t e = 0; e < d; ++e) {
      a += (pr_q.at(i, e) + pc_q.at(j, e)) * uq.at(e, c);
      b += (pr_k.at(m, e) + pc_k.at(n, e)) * uk.at(e, c);
    }
    dot += a * b;
  }
  const Tensor& table = pe.bias_table(g, h);
  const long di = static_cast<long>(m) - static_cast<long>(i);
  const long dj = static_cast<long>(n) - static_cast<long>(j);
  const std::size_t tr = gq.rows + gk.rows - 1, tc = gq.cols + gk.cols - 1;
  const std::size_t r = static_cast<std::size_t>(di + static_cast<long>(gq.rows) - 1);
  const std::size_t c = static_cast<std::size_t>(dj + static_cast<long>(gq.cols) - 1);
  return dot / std::sqrt(2.0 * static_cast<double>(dh)) + table.data()[head * tr * tc + r * tc + c];
}

// Success AUC by enumerating the 21 thresholds k/20 as integers.
inline double success_auc(const std::vector<double>& ious) {
  double total = 0;
  for (int k = 0; k <= 20; ++k) {
    int n = 0;
    for (double v : ious) n += (20.0 * v >= k) ? 1 : 0;
    total += static_cast<double>(n) / static_cast<double>(ious.size());
  }
  return total / 21.0;
}

inline double precision(const std::vector<double>& errors, double threshold = 20.0) {
  int n = 0;
  for (double v : errors) n += v <= threshold;
  return static_cast<double>(n) / static_cast<double>(errors.size());
}

struct Overlap {
  double ao = 0, sr50 = 0, sr75 = 0;
};

inline Overlap overlap(const std::vector<double>& ious) {
  Overlap o;
  for (double v : ious) {
    o.ao += v;
    o.sr50 += v > 0.5;
    o.sr75 += v > 0.75;
  }
  const double n = static_cast<double>(ious.size());
  return {o.ao / n, o.sr50 / n, o.sr75 / n};
}

}  // namespace swintrack::oracles
