#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "swintrack/gradcheck.hpp"
#include "swintrack/optim.hpp"
#include "test_util.hpp"

using namespace swintrack;
using swintrack::testing::max_abs_diff;
using swintrack::testing::random_tensor;

TEST(Tensor, ShapeAndDataAgree) {
  Tensor t({2, 3});
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_THROW(Tensor({2, 2}, std::vector<Scalar>(3)), DimensionError);
  EXPECT_THROW(Tensor(Shape{0, 2}), DimensionError);
}

TEST(Matmul, IdentityAndHandCases) {
  const Tensor eye({2, 2}, {1, 0, 0, 1});
  const Tensor m({2, 2}, {1, 2, 3, 4});
  const Tensor p = matmul(eye, m);
  EXPECT_EQ(std::vector<Scalar>(p.data().begin(), p.data().end()), (std::vector<Scalar>{1, 2, 3, 4}));
  EXPECT_EQ(matmul(Tensor({1, 2}, {1, 2}), Tensor({2, 1}, {3, 4})).item(), 11);
}

TEST(Matmul, TripleLoopOracle) {
  Rng rng(3);
  const Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 5}, rng);
  const Tensor c = matmul(a, b);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a.at(i, k) * b.at(k, j);
      EXPECT_NEAR(c.at(i, j), s, 1e-6);
    }
  }
  const Tensor nt = matmul_nt(a, transpose(b));
  EXPECT_LT(max_abs_diff(nt.data(), c.data()), 1e-12);
}

TEST(Matmul, BatchBroadcast) {
  Rng rng(4);
  const Tensor a = random_tensor({2, 3, 4}, rng), b = random_tensor({4, 2}, rng);
  const Tensor c = matmul(a, b);
  ASSERT_EQ(c.shape(), (Shape{2, 3, 2}));
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) s += a.data()[n * 12 + i * 4 + k] * b.at(k, j);
        EXPECT_NEAR(c.data()[n * 6 + i * 2 + j], s, 1e-12);
      }
    }
  }
}

TEST(Matmul, ShapeErrorNamesBothShapes) {
  try {
    matmul(Tensor({2, 3}), Tensor({2, 3}));
    FAIL();
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos) << msg;
  }
}

TEST(Softmax, UniformStableAndExtendedPrecision) {
  const Tensor u = softmax(Tensor({1, 3}, {0, 0, 0}), 1);
  for (Scalar v : u.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);

  const Tensor big = softmax(Tensor({1, 2}, {1000, 0}), 1);
  EXPECT_NEAR(big.data()[0], 1.0, 1e-12);
  EXPECT_NEAR(big.data()[1], 0.0, 1e-12);

  const Tensor s = softmax(Tensor({1, 3}, {1, 2, 3}), 1);
  long double denom = 0;
  for (int k = 1; k <= 3; ++k) denom += std::exp(static_cast<long double>(k));
  for (int k = 1; k <= 3; ++k) {
    EXPECT_NEAR(s.data()[k - 1], static_cast<double>(std::exp(static_cast<long double>(k)) / denom), 1e-15);
  }
}

TEST(Softmax, RowsSumToOneAlongEitherAxis) {
  Rng rng(5);
  const Tensor x = random_tensor({4, 6}, rng, 5.0);
  const Tensor rows = softmax(x, 1);
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < 6; ++c) s += rows.at(r, c);
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
  const Tensor cols = softmax(x, 0);
  for (std::size_t c = 0; c < 6; ++c) {
    double s = 0;
    for (std::size_t r = 0; r < 4; ++r) s += cols.at(r, c);
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(LayerNorm, Statistics) {
  const Tensor gain = Tensor::filled({3}, 1), bias = Tensor::filled({3}, 0);
  const Tensor y = layernorm(Tensor({1, 3}, {1, 2, 3}), gain, bias);
  // mean 2, biased variance 2/3
  const double sd = std::sqrt(2.0 / 3.0 + kLayerNormEps);
  EXPECT_NEAR(y.data()[0], -1.0 / sd, 1e-12);
  EXPECT_NEAR(y.data()[1], 0.0, 1e-12);
  EXPECT_NEAR(y.data()[2], 1.0 / sd, 1e-12);

  const Tensor c = layernorm(Tensor::filled({2, 3}, 7), gain, bias);
  for (Scalar v : c.data()) EXPECT_EQ(v, 0);

  const Tensor b({3}, {0.5, -1, 2});
  const Tensor g0 = layernorm(Tensor({1, 3}, {4, -2, 9}), Tensor::filled({3}, 0), b);
  EXPECT_EQ(std::vector<Scalar>(g0.data().begin(), g0.data().end()),
            std::vector<Scalar>(b.data().begin(), b.data().end()));

  Rng rng(6);
  const Tensor r = layernorm(random_tensor({5, 16}, rng, 3.0), Tensor::filled({16}, 1), Tensor::filled({16}, 0));
  for (std::size_t i = 0; i < 5; ++i) {
    double m = 0, v = 0;
    for (std::size_t c = 0; c < 16; ++c) m += r.at(i, c);
    m /= 16;
    for (std::size_t c = 0; c < 16; ++c) v += (r.at(i, c) - m) * (r.at(i, c) - m);
    EXPECT_NEAR(m, 0.0, 1e-5);
    EXPECT_NEAR(v / 16, 1.0, 1e-5);
  }
}

TEST(Gelu, ExactErfForm) {
  const Tensor y = gelu(Tensor({3}, {0, 1, 30}));
  EXPECT_EQ(y.data()[0], 0);
  EXPECT_NEAR(y.data()[1], 0.5 * (1 + std::erf(1 / std::sqrt(2.0))), 1e-14);
  EXPECT_NEAR(y.data()[1], 0.8413447460685429, 1e-12);
  EXPECT_NEAR(y.data()[2], 30.0, 1e-9);
}

TEST(Backward, QuadraticAndDetachedBranch) {
  ParameterSet params;
  Tensor w = params.add_zeros("w", {2});
  w.mutable_data()[0] = 1;
  w.mutable_data()[1] = 2;
  backward(sum(mul(w, w)));
  EXPECT_EQ(w.grad()[0], 2);
  EXPECT_EQ(w.grad()[1], 4);

  params.zero_grad();
  backward(add(sum(w), sum(mul(detach(w), detach(w)))));
  EXPECT_EQ(w.grad()[0], 1);
  EXPECT_EQ(w.grad()[1], 1);

  EXPECT_THROW(backward(w), DimensionError);
}

TEST(Backward, UnreachableParameterGetsZero) {
  ParameterSet params;
  Rng rng(1);
  Tensor a = params.add_normal("a", {3}, rng, 1.0);
  Tensor b = params.add_normal("b", {3}, rng, 1.0);
  backward(sum(a));
  for (Scalar g : b.grad()) EXPECT_EQ(g, 0);
}

TEST(Backward, SoftmaxCrossEntropyMatchesFiniteDifferences) {
  ParameterSet params;
  Rng rng(2);
  Tensor logits = params.add_normal("logits", {1, 3}, rng, 1.0);
  const Tensor onehot({1, 3}, {0, 1, 0});
  const auto loss = [&] { return scale(sum(mul(onehot, log(softmax(logits, 1)))), -1); };
  EXPECT_LT(fd_check(loss, params).max_rel_error, 1e-4);
}

TEST(FdCheck, TrivialFunctions) {
  ParameterSet params;
  Rng rng(8);
  Tensor a = params.add_normal("a", {1}, rng, 1.0);
  Tensor b = params.add_normal("b", {1}, rng, 1.0);
  EXPECT_LT(fd_check([&] { return add(scale(a, 3), b); }, params).max_rel_error, 1e-8);
  EXPECT_LT(fd_check([&] { return mul(a, b); }, params).max_rel_error, 1e-6);
}

// Every differentiable op composed on small random tensors.
// Unaligned storage lets vectorized kernels round differently from run to run.
TEST(Storage, AlignedForVectorKernels) {
  const auto aligned = [](const Tensor& t) {
    return reinterpret_cast<std::uintptr_t>(t.data().data()) % EIGEN_MAX_ALIGN_BYTES == 0;
  };
  Rng rng(3);
  std::vector<std::vector<char>> noise;
  for (std::size_t n = 1; n < 40; ++n) {
    noise.emplace_back(n * 7);
    const Tensor a = swintrack::testing::random_tensor({n, 3}, rng);
    const Tensor b = swintrack::testing::random_tensor({3, n}, rng);
    EXPECT_TRUE(aligned(a));
    EXPECT_TRUE(aligned(matmul(a, b)));
    EXPECT_TRUE(aligned(add(a, a)));
    EXPECT_TRUE(aligned(slice_rows(a, 0, 1)));
  }
}

TEST(FdCheck, OpCompositions) {
  ParameterSet params;
  Rng rng(9);
  Tensor x = params.add_normal("x", {3, 4}, rng, 1.0);
  Tensor w = params.add_normal("w", {4, 5}, rng, 0.5);
  Tensor b = params.add_normal("b", {5}, rng, 0.5);
  Tensor g = params.add_normal("g", {5}, rng, 1.0);
  Tensor v = params.add_normal("v", {2, 3, 4}, rng, 1.0);
  const auto loss = [&] {
    const Tensor h = gelu(linear(x, w, b));
    const Tensor n = layernorm(h, g, b);
    const Tensor s = softmax(matmul_nt(n, n), 1);
    const Tensor t = mul(sigmoid(n), exp(scale(n, 0.1)));
    const Tensor parts[2] = {slice_cols(t, 0, 2), slice_cols(s, 1, 2)};
    const Tensor rows[2] = {concat_cols(parts), slice_cols(slice_rows(n, 1, 2), 0, 4)};
    const Tensor cat = concat_rows(rows);
    const Tensor gathered = gather_rows(n, std::vector<std::size_t>{2, 0, 2});
    const Tensor bm = matmul(v, transpose(transpose(slice_rows(w, 0, 4))));
    const Tensor r = reshape(bm, {6, 5});
    return add(add(mean(mul(cat, cat)), sum(log(add_scalar(sigmoid(gathered), 1)))),
               add(sum(sub(r, add(r, r))), mean(s)));
  };
  EXPECT_LT(fd_check(loss, params).max_rel_error, 1e-6);
}

TEST(AdamW, HandTracedFirstStep) {
  ParameterSet params;
  Tensor w = params.add_filled("w", {1}, 1);
  AdamW opt(params, {0.9, 0.999, 1e-8, 0.0});
  w.mutable_grad()[0] = 1;
  opt.step(params, 0.1, 0);
  // m_hat = 1, v_hat = 1: w = 1 - 0.1 / (1 + 1e-8)
  EXPECT_NEAR(w.item(), 1 - 0.1 / (1 + 1e-8), 1e-15);
  EXPECT_EQ(opt.step_count(), 1u);
}

TEST(AdamW, DecayOnlyAndIdentity) {
  ParameterSet params;
  Tensor w = params.add_filled("w", {2}, 3);
  AdamW decay(params, {0.9, 0.999, 1e-8, 0.1});
  decay.step(params, 0.01, 0);
  EXPECT_NEAR(w.data()[0], 3 * (1 - 0.01 * 0.1), 1e-15);

  AdamW still(params, {0.9, 0.999, 1e-8, 0.0});
  const double before = w.data()[1];
  still.step(params, 0.5, 1.0);
  EXPECT_EQ(w.data()[1], before);
}

TEST(AdamW, ClippingAndNonFiniteGradient) {
  ParameterSet params;
  Tensor w = params.add_filled("layer.weight", {2}, 0);
  w.mutable_grad()[0] = 6;
  w.mutable_grad()[1] = 8;
  EXPECT_NEAR(clip_grad_norm(params, 1.0), 10.0, 1e-12);
  EXPECT_NEAR(w.grad()[0], 0.6, 1e-12);
  EXPECT_NEAR(w.grad()[1], 0.8, 1e-12);

  AdamW opt(params, {});
  w.mutable_grad()[1] = std::numeric_limits<Scalar>::quiet_NaN();
  try {
    opt.step(params, 0.1, 1.0);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("layer.weight"), std::string::npos);
  }
}

TEST(AdamW, LrMultiplierByPrefix) {
  ParameterSet params;
  Tensor a = params.add_filled("backbone.w", {1}, 0);
  Tensor b = params.add_filled("head.w", {1}, 0);
  AdamW opt(params, {0.9, 0.999, 1e-8, 0.0});
  opt.set_lr_multiplier(params, "backbone.", 0.1);
  a.mutable_grad()[0] = 1;
  b.mutable_grad()[0] = 1;
  opt.step(params, 0.1, 0);
  EXPECT_NEAR(a.item() / b.item(), 0.1, 1e-12);
}

TEST(LrSchedule, WarmupAndDrop) {
  const LrSchedule s{1.0, 100, 0.1, 0.7, 0.1};
  EXPECT_NEAR(s.at(0), 0.1, 1e-12);
  EXPECT_NEAR(s.at(9), 1.0, 1e-12);
  EXPECT_NEAR(s.at(50), 1.0, 1e-12);
  EXPECT_NEAR(s.at(69), 1.0, 1e-12);
  EXPECT_NEAR(s.at(70), 0.1, 1e-12);
  for (std::size_t i = 1; i < 10; ++i) EXPECT_GT(s.at(i), s.at(i - 1));
}
