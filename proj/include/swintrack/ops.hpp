#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swintrack/tensor.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Matrix products. Operands are rank 2 or rank 3; a rank-3 operand against a
// rank-2 one broadcasts the latter over the leading batch dimension.
Tensor matmul(const Tensor& a, const Tensor& b);
// a · bᵀ without materialising the transpose.
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// x · w + b for x [n, in], w [in, out], b [out].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Elementwise arithmetic. `b` may match `a` exactly, match its trailing
// dimension (row broadcast), or hold a single element.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Scalar factor);
Tensor add_scalar(const Tensor& a, Scalar value);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

Tensor softmax(const Tensor& x, std::size_t axis);
// Normalises over the last dimension, eps = 1e-5 inside the root.
Tensor layernorm(const Tensor& x, const Tensor& gain, const Tensor& bias);
inline constexpr double kLayerNormEps = 1e-5;

// Exact x·Φ(x).
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);

// Token-axis (rows) and channel-axis (cols) bookkeeping on rank-2 tensors.
Tensor slice_rows(const Tensor& x, std::size_t start, std::size_t count);
Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t count);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);

// Picks whole rows of a rank-2 table: out[r] = table[indices[r]].
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices);
// Flat elementwise gather: out.flat[e] = table.flat[indices[e]].
Tensor gather(const Tensor& table, std::span<const std::size_t> indices, Shape out_shape);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
