#include "swintrack/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

namespace {

using MatrixRM = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const MatrixRM>;
using Map = Eigen::Map<MatrixRM>;
using Eigen::Index;

MapC view(const Scalar* p, std::size_t rows, std::size_t cols) {
  return MapC(p, static_cast<Index>(rows), static_cast<Index>(cols));
}
Map view(Scalar* p, std::size_t rows, std::size_t cols) {
  return Map(p, static_cast<Index>(rows), static_cast<Index>(cols));
}

detail::Node& input(detail::Node& out, std::size_t i) { return *out.inputs[i]; }

std::string two_shapes(const char* op, const Tensor& a, const Tensor& b) {
  return std::string(op) + ": incompatible shapes " + shape_string(a.shape()) + " and " +
         shape_string(b.shape());
}

// Batched view of a rank-2 or rank-3 operand.
struct MatOperand {
  std::size_t batch, rows, cols;
};

MatOperand mat_operand(const Tensor& t, const char* op) {
  if (t.rank() == 2) return {1, t.dim(0), t.dim(1)};
  if (t.rank() == 3) return {t.dim(0), t.dim(1), t.dim(2)};
  throw DimensionError(std::string(op) + ": expected rank 2 or 3, got " + shape_string(t.shape()));
}

// Shared implementation of a·b and a·bᵀ.
Tensor matmul_impl(const Tensor& a, const Tensor& b, bool transpose_b, const char* name) {
  const MatOperand ma = mat_operand(a, name);
  const MatOperand mb = mat_operand(b, name);
  const std::size_t inner_b = transpose_b ? mb.cols : mb.rows;
  const std::size_t n = transpose_b ? mb.rows : mb.cols;
  if (ma.cols != inner_b) throw DimensionError(two_shapes(name, a, b));
  if (ma.batch != mb.batch && ma.batch != 1 && mb.batch != 1) {
    throw DimensionError(two_shapes(name, a, b));
  }
  if (ma.batch != mb.batch && a.rank() == 3 && b.rank() == 3) {
    throw DimensionError(two_shapes(name, a, b));
  }
  const std::size_t batch = std::max(ma.batch, mb.batch);
  const std::size_t m = ma.rows, k = ma.cols;
  const std::size_t a_stride = ma.batch == 1 ? 0 : m * k;
  const std::size_t b_stride = mb.batch == 1 ? 0 : mb.rows * mb.cols;

  Buffer out(batch * m * n);
  for (std::size_t i = 0; i < batch; ++i) {
    auto A = view(a.data().data() + i * a_stride, m, k);
    auto B = view(b.data().data() + i * b_stride, mb.rows, mb.cols);
    auto C = view(out.data() + i * m * n, m, n);
    if (transpose_b) {
      C.noalias() = A * B.transpose();
    } else {
      C.noalias() = A * B;
    }
  }
  Shape shape = (a.rank() == 3 || b.rank() == 3) ? Shape{batch, m, n} : Shape{m, n};

  return make_result(std::move(shape), std::move(out), {a, b},
                     [=](detail::Node& node) {
                       detail::Node& na = input(node, 0);
                       detail::Node& nb = input(node, 1);
                       for (std::size_t i = 0; i < batch; ++i) {
                         auto dC = view(node.grad.data() + i * m * n, m, n);
                         auto A = view(na.value.data() + i * a_stride, m, k);
                         auto B = view(nb.value.data() + i * b_stride, mb.rows, mb.cols);
                         if (na.requires_grad) {
                           auto dA = view(na.ensure_grad().data() + i * a_stride, m, k);
                           if (transpose_b) {
                             dA.noalias() += dC * B;
                           } else {
                             dA.noalias() += dC * B.transpose();
                           }
                         }
                         if (nb.requires_grad) {
                           auto dB = view(nb.ensure_grad().data() + i * b_stride, mb.rows, mb.cols);
                           if (transpose_b) {
                             dB.noalias() += dC.transpose() * A;
                           } else {
                             dB.noalias() += A.transpose() * dC;
                           }
                         }
                       }
                     });
}

enum class BroadcastKind { kSame, kRow, kScalar };

BroadcastKind broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return BroadcastKind::kSame;
  if (b.numel() == 1) return BroadcastKind::kScalar;
  if (b.numel() == a.shape().back() && (b.rank() == 1 || (b.rank() == 2 && b.dim(0) == 1))) {
    return BroadcastKind::kRow;
  }
  throw DimensionError(two_shapes(op, a, b));
}

inline std::size_t bidx(BroadcastKind kind, std::size_t i, std::size_t row_len) {
  switch (kind) {
    case BroadcastKind::kSame:
      return i;
    case BroadcastKind::kRow:
      return i % row_len;
    case BroadcastKind::kScalar:
      break;
  }
  return 0;
}

template <typename Fn>
Tensor unary(const Tensor& x, Fn fn, std::function<void(detail::Node&)> bwd) {
  Buffer out(x.numel());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(in[i]);
  return make_result(x.shape(), std::move(out), {x}, std::move(bwd));
}

Scalar normal_cdf(Scalar x) {
  return Scalar(0.5) * (Scalar(1) + std::erf(x / std::sqrt(Scalar(2))));
}

Scalar normal_pdf(Scalar x) {
  return std::exp(Scalar(-0.5) * x * x) / std::sqrt(Scalar(2 * M_PI));
}

void require_rank2(const Tensor& x, const char* op) {
  if (x.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected rank 2, got " + shape_string(x.shape()));
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) { return matmul_impl(a, b, false, "matmul"); }

Tensor matmul_nt(const Tensor& a, const Tensor& b) { return matmul_impl(a, b, true, "matmul_nt"); }

Tensor transpose(const Tensor& a) {
  require_rank2(a, "transpose");
  const std::size_t r = a.dim(0), c = a.dim(1);
  Buffer out(a.numel());
  view(out.data(), c, r) = view(a.data().data(), r, c).transpose();
  return make_result({c, r}, std::move(out), {a}, [r, c](detail::Node& node) {
    view(input(node, 0).ensure_grad().data(), r, c) += view(node.grad.data(), c, r).transpose();
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank2(x, "linear");
  require_rank2(weight, "linear");
  const std::size_t n = x.dim(0), in = x.dim(1), out_dim = weight.dim(1);
  if (weight.dim(0) != in) throw DimensionError(two_shapes("linear", x, weight));
  if (bias.numel() != out_dim) throw DimensionError(two_shapes("linear", weight, bias));

  Buffer out(n * out_dim);
  auto Y = view(out.data(), n, out_dim);
  Y.noalias() = view(x.data().data(), n, in) * view(weight.data().data(), in, out_dim);
  Y.rowwise() += view(bias.data().data(), 1, out_dim).row(0);

  return make_result({n, out_dim}, std::move(out), {x, weight, bias},
                     [n, in, out_dim](detail::Node& node) {
                       detail::Node& nx = input(node, 0);
                       detail::Node& nw = input(node, 1);
                       detail::Node& nb = input(node, 2);
                       auto dY = view(node.grad.data(), n, out_dim);
                       if (nx.requires_grad) {
                         view(nx.ensure_grad().data(), n, in).noalias() +=
                             dY * view(nw.value.data(), in, out_dim).transpose();
                       }
                       if (nw.requires_grad) {
                         view(nw.ensure_grad().data(), in, out_dim).noalias() +=
                             view(nx.value.data(), n, in).transpose() * dY;
                       }
                       if (nb.requires_grad) {
                         view(nb.ensure_grad().data(), 1, out_dim) += dY.colwise().sum();
                       }
                     });
}

Tensor add(const Tensor& a, const Tensor& b) {
  const BroadcastKind kind = broadcast_kind(a, b, "add");
  const std::size_t row = a.shape().back();
  Buffer out(a.numel());
  const auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[bidx(kind, i, row)];
  return make_result(a.shape(), std::move(out), {a, b}, [kind, row](detail::Node& node) {
    detail::Node& na = input(node, 0);
    detail::Node& nb = input(node, 1);
    if (na.requires_grad) {
      auto& g = na.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
    }
    if (nb.requires_grad) {
      auto& g = nb.ensure_grad();
      for (std::size_t i = 0; i < node.grad.size(); ++i) g[bidx(kind, i, row)] += node.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  const BroadcastKind kind = broadcast_kind(a, b, "sub");
  const std::size_t row = a.shape().back();
  Buffer out(a.numel());
  const auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[bidx(kind, i, row)];
  return make_result(a.shape(), std::move(out), {a, b}, [kind, row](detail::Node& node) {
    detail::Node& na = input(node, 0);
    detail::Node& nb = input(node, 1);
    if (na.requires_grad) {
      auto& g = na.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
    }
    if (nb.requires_grad) {
      auto& g = nb.ensure_grad();
      for (std::size_t i = 0; i < node.grad.size(); ++i) g[bidx(kind, i, row)] -= node.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  const BroadcastKind kind = broadcast_kind(a, b, "mul");
  const std::size_t row = a.shape().back();
  Buffer out(a.numel());
  const auto av = a.data(), bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[bidx(kind, i, row)];
  return make_result(a.shape(), std::move(out), {a, b}, [kind, row](detail::Node& node) {
    detail::Node& na = input(node, 0);
    detail::Node& nb = input(node, 1);
    if (na.requires_grad) {
      auto& g = na.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] * nb.value[bidx(kind, i, row)];
    }
    if (nb.requires_grad) {
      auto& g = nb.ensure_grad();
      for (std::size_t i = 0; i < node.grad.size(); ++i) {
        g[bidx(kind, i, row)] += node.grad[i] * na.value[i];
      }
    }
  });
}

Tensor scale(const Tensor& a, Scalar factor) {
  return unary(a, [factor](Scalar v) { return v * factor; }, [factor](detail::Node& node) {
    auto& g = input(node, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] * factor;
  });
}

Tensor add_scalar(const Tensor& a, Scalar value) {
  return unary(a, [value](Scalar v) { return v + value; }, [](detail::Node& node) {
    auto& g = input(node, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
  });
}

Tensor sum(const Tensor& a) {
  const auto v = a.data();
  // Accumulate in double so 32-bit reductions stay order-stable and accurate.
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  return make_result({1}, {static_cast<Scalar>(total)}, {a}, [](detail::Node& node) {
    auto& g = input(node, 0).ensure_grad();
    for (Scalar& gi : g) gi += node.grad[0];
  });
}

Tensor mean(const Tensor& a) { return scale(sum(a), Scalar(1) / static_cast<Scalar>(a.numel())); }

Tensor softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) + " invalid for shape " +
                         shape_string(x.shape()));
  }
  const std::size_t extent = x.dim(axis);
  std::size_t inner = 1;
  for (std::size_t d = axis + 1; d < x.rank(); ++d) inner *= x.dim(d);
  const std::size_t outer = x.numel() / (extent * inner);

  Buffer out(x.numel());
  const auto in = x.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * extent * inner + i;
      Scalar peak = in[base];
      for (std::size_t e = 1; e < extent; ++e) peak = std::max(peak, in[base + e * inner]);
      Scalar total = 0;
      for (std::size_t e = 0; e < extent; ++e) {
        const Scalar v = std::exp(in[base + e * inner] - peak);
        out[base + e * inner] = v;
        total += v;
      }
      for (std::size_t e = 0; e < extent; ++e) out[base + e * inner] /= total;
    }
  }
  return make_result(x.shape(), std::move(out), {x}, [outer, extent, inner](detail::Node& node) {
    auto& g = input(node, 0).ensure_grad();
    const auto& y = node.value;
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t base = o * extent * inner + i;
        Scalar dot = 0;
        for (std::size_t e = 0; e < extent; ++e) {
          dot += node.grad[base + e * inner] * y[base + e * inner];
        }
        for (std::size_t e = 0; e < extent; ++e) {
          const std::size_t k = base + e * inner;
          g[k] += y[k] * (node.grad[k] - dot);
        }
      }
    }
  });
}

Tensor layernorm(const Tensor& x, const Tensor& gain, const Tensor& bias) {
  const std::size_t channels = x.shape().back();
  if (channels < 1) throw DimensionError("layernorm: empty channel dimension");
  if (gain.numel() != channels || bias.numel() != channels) {
    throw DimensionError("layernorm: gain/bias " + shape_string(gain.shape()) + "/" +
                         shape_string(bias.shape()) + " do not match input " +
                         shape_string(x.shape()));
  }
  const std::size_t rows = x.numel() / channels;
  Buffer out(x.numel());
  Buffer normalized(x.numel());
  Buffer inv_std(rows);
  const auto in = x.data(), gv = gain.data(), bv = bias.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const Scalar* row = in.data() + r * channels;
    Scalar mu = 0;
    for (std::size_t c = 0; c < channels; ++c) mu += row[c];
    mu /= static_cast<Scalar>(channels);
    Scalar var = 0;
    for (std::size_t c = 0; c < channels; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<Scalar>(channels);
    const Scalar is = Scalar(1) / std::sqrt(var + static_cast<Scalar>(kLayerNormEps));
    inv_std[r] = is;
    for (std::size_t c = 0; c < channels; ++c) {
      const Scalar xh = (row[c] - mu) * is;
      normalized[r * channels + c] = xh;
      out[r * channels + c] = gv[c] * xh + bv[c];
    }
  }
  return make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [rows, channels, normalized = std::move(normalized),
       inv_std = std::move(inv_std)](detail::Node& node) {
        detail::Node& nx = input(node, 0);
        detail::Node& ng = input(node, 1);
        detail::Node& nb = input(node, 2);
        const auto& dy = node.grad;
        if (ng.requires_grad || nb.requires_grad) {
          auto& gg = ng.ensure_grad();
          auto& gb = nb.ensure_grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < channels; ++c) {
              gg[c] += dy[r * channels + c] * normalized[r * channels + c];
              gb[c] += dy[r * channels + c];
            }
          }
        }
        if (nx.requires_grad) {
          auto& gx = nx.ensure_grad();
          const Scalar inv_n = Scalar(1) / static_cast<Scalar>(channels);
          for (std::size_t r = 0; r < rows; ++r) {
            Scalar mean_dxh = 0, mean_dxh_xh = 0;
            for (std::size_t c = 0; c < channels; ++c) {
              const Scalar dxh = dy[r * channels + c] * ng.value[c];
              mean_dxh += dxh;
              mean_dxh_xh += dxh * normalized[r * channels + c];
            }
            mean_dxh *= inv_n;
            mean_dxh_xh *= inv_n;
            for (std::size_t c = 0; c < channels; ++c) {
              const Scalar dxh = dy[r * channels + c] * ng.value[c];
              gx[r * channels + c] +=
                  inv_std[r] * (dxh - mean_dxh - normalized[r * channels + c] * mean_dxh_xh);
            }
          }
        }
      });
}

Tensor gelu(const Tensor& x) {
  return unary(x, [](Scalar v) { return v * normal_cdf(v); }, [](detail::Node& node) {
    detail::Node& nx = input(node, 0);
    auto& g = nx.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Scalar v = nx.value[i];
      g[i] += node.grad[i] * (normal_cdf(v) + v * normal_pdf(v));
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](Scalar v) {
        if (v >= 0) return Scalar(1) / (Scalar(1) + std::exp(-v));
        const Scalar e = std::exp(v);
        return e / (Scalar(1) + e);
      },
      [](detail::Node& node) {
        auto& g = input(node, 0).ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) {
          const Scalar y = node.value[i];
          g[i] += node.grad[i] * y * (Scalar(1) - y);
        }
      });
}

Tensor exp(const Tensor& x) {
  return unary(x, [](Scalar v) { return std::exp(v); }, [](detail::Node& node) {
    auto& g = input(node, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] * node.value[i];
  });
}

Tensor log(const Tensor& x) {
  return unary(x, [](Scalar v) { return std::log(v); }, [](detail::Node& node) {
    detail::Node& nx = input(node, 0);
    auto& g = nx.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i] / nx.value[i];
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: " + shape_string(x.shape()) + " -> " + shape_string(shape));
  }
  return make_result(std::move(shape), Buffer(x.data().begin(), x.data().end()), {x},
                     [](detail::Node& node) {
                       auto& g = input(node, 0).ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
                     });
}

Tensor slice_rows(const Tensor& x, std::size_t start, std::size_t count) {
  require_rank2(x, "slice_rows");
  if (count == 0 || start + count > x.dim(0)) {
    throw DimensionError("slice_rows: [" + std::to_string(start) + ", +" + std::to_string(count) +
                         ") out of range for " + shape_string(x.shape()));
  }
  const std::size_t cols = x.dim(1);
  const auto first = x.data().begin() + static_cast<std::ptrdiff_t>(start * cols);
  Buffer out(first, first + static_cast<std::ptrdiff_t>(count * cols));
  return make_result({count, cols}, std::move(out), {x}, [start, cols](detail::Node& node) {
    auto& g = input(node, 0).ensure_grad();
    for (std::size_t i = 0; i < node.grad.size(); ++i) g[start * cols + i] += node.grad[i];
  });
}

Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t count) {
  require_rank2(x, "slice_cols");
  if (count == 0 || start + count > x.dim(1)) {
    throw DimensionError("slice_cols: [" + std::to_string(start) + ", +" + std::to_string(count) +
                         ") out of range for " + shape_string(x.shape()));
  }
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  Buffer out(rows * count);
  view(out.data(), rows, count) =
      view(x.data().data(), rows, cols).middleCols(static_cast<Index>(start), static_cast<Index>(count));
  return make_result({rows, count}, std::move(out), {x}, [=](detail::Node& node) {
    view(input(node, 0).ensure_grad().data(), rows, cols)
        .middleCols(static_cast<Index>(start), static_cast<Index>(count)) +=
        view(node.grad.data(), rows, count);
  });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t cols = parts.front().shape().back();
  std::size_t rows = 0;
  std::vector<std::size_t> offsets;
  for (const Tensor& p : parts) {
    require_rank2(p, "concat_rows");
    if (p.dim(1) != cols) throw DimensionError(two_shapes("concat_rows", parts.front(), p));
    offsets.push_back(rows * cols);
    rows += p.dim(0);
  }
  Buffer out;
  out.reserve(rows * cols);
  for (const Tensor& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return make_result({rows, cols}, std::move(out), std::vector<Tensor>(parts.begin(), parts.end()),
                     [offsets](detail::Node& node) {
                       for (std::size_t k = 0; k < node.inputs.size(); ++k) {
                         detail::Node& in = input(node, k);
                         if (!in.requires_grad) continue;
                         auto& g = in.ensure_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[offsets[k] + i];
                       }
                     });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t rows = parts.front().dim(0);
  std::size_t cols = 0;
  std::vector<std::size_t> offsets, widths;
  for (const Tensor& p : parts) {
    require_rank2(p, "concat_cols");
    if (p.dim(0) != rows) throw DimensionError(two_shapes("concat_cols", parts.front(), p));
    offsets.push_back(cols);
    widths.push_back(p.dim(1));
    cols += p.dim(1);
  }
  Buffer out(rows * cols);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    view(out.data(), rows, cols).middleCols(static_cast<Index>(offsets[k]), static_cast<Index>(widths[k])) =
        view(parts[k].data().data(), rows, widths[k]);
  }
  return make_result({rows, cols}, std::move(out), std::vector<Tensor>(parts.begin(), parts.end()),
                     [rows, cols, offsets, widths](detail::Node& node) {
                       auto dY = view(node.grad.data(), rows, cols);
                       for (std::size_t k = 0; k < node.inputs.size(); ++k) {
                         detail::Node& in = input(node, k);
                         if (!in.requires_grad) continue;
                         view(in.ensure_grad().data(), rows, widths[k]) += dY.middleCols(
                             static_cast<Index>(offsets[k]), static_cast<Index>(widths[k]));
                       }
                     });
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices) {
  require_rank2(table, "gather_rows");
  if (indices.empty()) throw DimensionError("gather_rows: no indices");
  const std::size_t cols = table.dim(1);
  Buffer out(indices.size() * cols);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= table.dim(0)) {
      throw DimensionError("gather_rows: index " + std::to_string(indices[r]) +
                           " out of range for " + shape_string(table.shape()));
    }
    std::copy_n(table.data().begin() + static_cast<std::ptrdiff_t>(indices[r] * cols), cols,
                out.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_result({indices.size(), cols}, std::move(out), {table},
                     [idx = std::move(idx), cols](detail::Node& node) {
                       auto& g = input(node, 0).ensure_grad();
                       for (std::size_t r = 0; r < idx.size(); ++r) {
                         for (std::size_t c = 0; c < cols; ++c) {
                           g[idx[r] * cols + c] += node.grad[r * cols + c];
                         }
                       }
                     });
}

Tensor gather(const Tensor& table, std::span<const std::size_t> indices, Shape out_shape) {
  if (shape_numel(out_shape) != indices.size()) {
    throw DimensionError("gather: " + std::to_string(indices.size()) + " indices for shape " +
                         shape_string(out_shape));
  }
  Buffer out(indices.size());
  const auto tv = table.data();
  for (std::size_t e = 0; e < indices.size(); ++e) {
    if (indices[e] >= tv.size()) {
      throw DimensionError("gather: index " + std::to_string(indices[e]) + " out of range for " +
                           shape_string(table.shape()));
    }
    out[e] = tv[indices[e]];
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_result(std::move(out_shape), std::move(out), {table},
                     [idx = std::move(idx)](detail::Node& node) {
                       auto& g = input(node, 0).ensure_grad();
                       for (std::size_t e = 0; e < idx.size(); ++e) g[idx[e]] += node.grad[e];
                     });
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
