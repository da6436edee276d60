#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "swintrack/attention.hpp"
#include "swintrack/gradcheck.hpp"
#include "test_util.hpp"

using namespace swintrack;
using swintrack::testing::max_abs_diff;
using swintrack::testing::random_tensor;

namespace {

void set_identity(Tensor& w) {
  auto v = w.mutable_data();
  std::fill(v.begin(), v.end(), 0);
  for (std::size_t i = 0; i < w.dim(0); ++i) v[i * w.dim(1) + i] = 1;
}

void randomize(ParameterSet& params, Rng& rng, double sd) {
  for (Parameter& p : params.items()) {
    for (Scalar& v : p.tensor.mutable_data()) v = static_cast<Scalar>(rng.normal(0.0, sd));
  }
}

// Per-head loop oracle of softmax(q Wq_h (k Wk_h)^T * scale + bias_h) v Wv_h, concatenated, times Wo.
std::vector<double> attention_oracle(const Tensor& q, const Tensor& k, const Tensor& v,
                                     const AttentionWeights& w, const AttentionConfig& cfg,
                                     const AttentionLogitBias* bias) {
  const std::size_t d = cfg.d_model, dh = cfg.d_head(), lq = q.dim(0), lk = k.dim(0);
  auto project = [&](const Tensor& x, const Linear& l) {
    std::vector<double> out(x.dim(0) * d);
    for (std::size_t r = 0; r < x.dim(0); ++r)
      for (std::size_t c = 0; c < d; ++c) {
        double s = l.bias.data()[c];
        for (std::size_t i = 0; i < d; ++i) s += x.at(r, i) * l.weight.at(i, c);
        out[r * d + c] = s;
      }
    return out;
  };
  const auto Q = project(q, w.wq), K = project(k, w.wk), V = project(v, w.wv);
  const double scale = 1.0 / std::sqrt((bias ? 2.0 : 1.0) * static_cast<double>(dh));
  std::vector<double> merged(lq * d, 0.0);
  for (std::size_t h = 0; h < cfg.n_heads; ++h) {
    for (std::size_t a = 0; a < lq; ++a) {
      std::vector<double> logits(lk);
      for (std::size_t b = 0; b < lk; ++b) {
        double s = 0;
        for (std::size_t c = 0; c < dh; ++c) s += Q[a * d + h * dh + c] * K[b * d + h * dh + c];
        logits[b] = s * scale + (bias ? bias->heads[h].at(a, b) : 0.0);
      }
      const double mx = *std::max_element(logits.begin(), logits.end());
      double z = 0;
      for (double& l : logits) z += (l = std::exp(l - mx));
      for (std::size_t c = 0; c < dh; ++c) {
        double s = 0;
        for (std::size_t b = 0; b < lk; ++b) s += logits[b] / z * V[b * d + h * dh + c];
        merged[a * d + h * dh + c] = s;
      }
    }
  }
  std::vector<double> out(lq * d);
  for (std::size_t r = 0; r < lq; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      double s = w.wo.bias.data()[c];
      for (std::size_t i = 0; i < d; ++i) s += merged[r * d + i] * w.wo.weight.at(i, c);
      out[r * d + c] = s;
    }
  return out;
}

Tensor permute_rows(const Tensor& x, const std::vector<std::size_t>& perm) { return gather_rows(x, perm); }

}  // namespace

TEST(Attention, SingleTokenReturnsValue) {
  ParameterSet params;
  Rng rng(1);
  const AttentionConfig cfg{3, 1};
  AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  for (Linear* l : {&w.wq, &w.wk, &w.wv, &w.wo}) set_identity(l->weight);
  const Tensor x({1, 3}, {0.3, -1.0, 2.0});
  const Tensor y = multi_head_attention(x, x, x, w, cfg);
  EXPECT_LT(max_abs_diff(y.data(), x.data()), 1e-15);
}

TEST(Attention, IdenticalKeysGiveThatValue) {
  ParameterSet params;
  Rng rng(2);
  const AttentionConfig cfg{4, 2};
  AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  for (Linear* l : {&w.wv, &w.wo}) set_identity(l->weight);
  const Tensor kv({2, 4}, {1, 2, 3, 4, 1, 2, 3, 4});
  const Tensor y = multi_head_attention(random_tensor({3, 4}, rng), kv, kv, w, cfg);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(y.at(r, c), kv.at(0, c), 1e-14);
}

TEST(Attention, LoopOracleWithAndWithoutBias) {
  ParameterSet params;
  Rng rng(3);
  const AttentionConfig cfg{6, 3};
  const AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  randomize(params, rng, 0.5);
  const Tensor q = random_tensor({3, 6}, rng), k = random_tensor({4, 6}, rng), v = random_tensor({4, 6}, rng);
  AttentionLogitBias bias;
  for (int h = 0; h < 3; ++h) bias.heads.push_back(random_tensor({3, 4}, rng));

  const auto plain = attention_oracle(q, k, v, w, cfg, nullptr);
  const Tensor y = multi_head_attention(q, k, v, w, cfg);
  for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_NEAR(y.data()[i], plain[i], 1e-5);

  const auto biased = attention_oracle(q, k, v, w, cfg, &bias);
  const Tensor yb = multi_head_attention(q, k, v, w, cfg, &bias);
  for (std::size_t i = 0; i < biased.size(); ++i) EXPECT_NEAR(yb.data()[i], biased[i], 1e-5);
}

TEST(Attention, LogitScales) {
  EXPECT_DOUBLE_EQ(content_logit_scale({8, 2}, false), 0.5);
  EXPECT_DOUBLE_EQ(content_logit_scale({8, 1}, true), 1.0 / std::sqrt(16.0));
}

TEST(AttentionLogits, HandCases) {
  ParameterSet params;
  Rng rng(4);
  const AttentionConfig one{1, 1};
  AttentionWeights w = AttentionWeights::create(params, "a", one, rng);
  set_identity(w.wq.weight);
  set_identity(w.wk.weight);
  const Tensor unit({1, 1}, std::vector<Scalar>{1});
  EXPECT_EQ(attention_logits(unit, unit, w, one, 0, 1).item(), 1);

  ParameterSet p2;
  const AttentionConfig two{2, 1};
  AttentionWeights w2 = AttentionWeights::create(p2, "a", two, rng);
  set_identity(w2.wq.weight);
  set_identity(w2.wk.weight);
  EXPECT_EQ(attention_logits(Tensor({1, 2}, {1, 0}), Tensor({1, 2}, {0, 1}), w2, two, 0, 1).item(), 0);
}

TEST(AttentionLogits, DotProductOracle) {
  ParameterSet params;
  Rng rng(5);
  const AttentionConfig cfg{4, 2};
  const AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  randomize(params, rng, 0.7);
  const Tensor q = random_tensor({2, 4}, rng), k = random_tensor({3, 4}, rng);
  const Tensor l = attention_logits(q, k, w, cfg, 1, 0.25);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      double s = 0;
      for (std::size_t c = 2; c < 4; ++c) {
        double qa = w.wq.bias.data()[c], kb = w.wk.bias.data()[c];
        for (std::size_t i = 0; i < 4; ++i) {
          qa += q.at(a, i) * w.wq.weight.at(i, c);
          kb += k.at(b, i) * w.wk.weight.at(i, c);
        }
        s += qa * kb;
      }
      EXPECT_NEAR(l.at(a, b), 0.25 * s, 1e-12);
    }
}

TEST(Attention, PermutationEquivariantWithoutBias) {
  ParameterSet params;
  Rng rng(6);
  const AttentionConfig cfg{8, 2};
  const AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  randomize(params, rng, 0.5);
  const Tensor x = random_tensor({7, 8}, rng);
  std::vector<std::size_t> perm(7);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(11));
  const Tensor y = multi_head_attention(x, x, x, w, cfg);
  const Tensor xp = permute_rows(x, perm);
  const Tensor yp = multi_head_attention(xp, xp, xp, w, cfg);
  EXPECT_LT(max_abs_diff(yp.data(), permute_rows(y, perm).data()), 1e-12);

  AttentionLogitBias bias;
  for (int h = 0; h < 2; ++h) bias.heads.push_back(random_tensor({7, 7}, rng));
  const Tensor yb = multi_head_attention(x, x, x, w, cfg, &bias);
  const Tensor ybp = multi_head_attention(xp, xp, xp, w, cfg, &bias);
  EXPECT_GT(max_abs_diff(ybp.data(), permute_rows(yb, perm).data()), 1e-3);
}

TEST(Attention, RecordedRowsAreStochastic) {
  ParameterSet params;
  Rng rng(7);
  const AttentionConfig cfg{4, 2};
  const AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  randomize(params, rng, 1.0);
  AttentionRecorder rec{"layer"};
  const Tensor x = random_tensor({5, 4}, rng, 3.0);
  multi_head_attention(x, x, x, w, cfg, nullptr, &rec);
  ASSERT_EQ(rec.maps.size(), 2u);
  EXPECT_EQ(rec.maps[1].first, "layer.head1");
  for (const auto& [label, m] : rec.maps)
    for (std::size_t r = 0; r < 5; ++r) {
      double s = 0;
      for (std::size_t c = 0; c < 5; ++c) s += m.at(r, c);
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
}

TEST(Attention, OneHeadMatchesSingleHeadFormula) {
  ParameterSet params;
  Rng rng(8);
  const AttentionConfig cfg{4, 1};
  const AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  randomize(params, rng, 0.5);
  const Tensor x = random_tensor({3, 4}, rng);
  const Tensor logits = attention_logits(x, x, w, cfg, 0, content_logit_scale(cfg, false));
  const Tensor direct = w.wo(matmul(softmax(logits, 1), w.wv(x)));
  EXPECT_EQ(max_abs_diff(multi_head_attention(x, x, x, w, cfg).data(), direct.data()), 0.0);
}

TEST(Attention, ShapeErrors) {
  ParameterSet params;
  Rng rng(9);
  const AttentionConfig cfg{4, 2};
  const AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  const Tensor x = random_tensor({3, 4}, rng);
  EXPECT_THROW(multi_head_attention(x, x, random_tensor({2, 4}, rng), w, cfg), DimensionError);
  AttentionLogitBias bad{{random_tensor({3, 3}, rng)}};
  EXPECT_THROW(multi_head_attention(x, x, x, w, cfg, &bad), DimensionError);
  EXPECT_THROW((AttentionConfig{6, 4}.validate()), std::invalid_argument);
}

TEST(Attention, GradientsMatchFiniteDifferences) {
  ParameterSet params;
  Rng rng(10);
  const AttentionConfig cfg{4, 2};
  const AttentionWeights w = AttentionWeights::create(params, "a", cfg, rng);
  randomize(params, rng, 0.5);
  Tensor x = params.add_normal("x", {3, 4}, rng, 1.0);
  Tensor b = params.add_normal("b", {3, 3}, rng, 1.0);
  const auto loss = [&] {
    AttentionLogitBias bias{{b, scale(b, -1)}};
    const Tensor y = multi_head_attention(x, x, x, w, cfg, &bias);
    return sum(mul(y, y));
  };
  EXPECT_LT(fd_check(loss, params).max_rel_error, 1e-6);
}
