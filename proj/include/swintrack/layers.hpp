#pragma once

#include <string>

#include "swintrack/ops.hpp"
#include "swintrack/parameter.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

// Standard deviation used for every projection matrix at initialisation.
inline constexpr double kInitStddev = 0.02;

struct Linear {
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]

  static Linear create(ParameterSet& params, const std::string& prefix, std::size_t in,
                       std::size_t out, Rng& rng, double stddev = kInitStddev);
  Tensor operator()(const Tensor& x) const { return linear(x, weight, bias); }
};

struct LayerNormParams {
  Tensor gain;
  Tensor bias;

  static LayerNormParams create(ParameterSet& params, const std::string& prefix,
                                std::size_t channels);
  Tensor operator()(const Tensor& x) const { return layernorm(x, gain, bias); }
};

// Two-layer MLP with a GELU in between.
struct FeedForward {
  Linear fc1;
  Linear fc2;

  static FeedForward create(ParameterSet& params, const std::string& prefix, std::size_t channels,
                            std::size_t hidden, Rng& rng);
  Tensor operator()(const Tensor& x) const { return fc2(gelu(fc1(x))); }
};

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
