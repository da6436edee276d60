#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "swintrack/parameter.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

// Global L2 norm over all parameter gradients.
double global_grad_norm(const ParameterSet& params);

// Scales every gradient so the global norm is at most `max_norm` (disabled
// when max_norm <= 0). Returns the norm measured before clipping.
double clip_grad_norm(ParameterSet& params, double max_norm);

// AdamW with decoupled weight decay and bias-corrected moments. Moments are
// kept in 64-bit regardless of the scalar type of the parameters.
class AdamW {
 public:
  AdamW(const ParameterSet& params, AdamWConfig config);

  // Parameters whose name starts with `prefix` use lr * multiplier.
  void set_lr_multiplier(const ParameterSet& params, std::string_view prefix, double multiplier);

  // Clips, then applies one update with learning rate `lr`. Throws
  // std::runtime_error naming the first parameter with a non-finite gradient.
  // Returns the pre-clipping gradient norm.
  double step(ParameterSet& params, double lr, double grad_clip_norm);

  std::uint64_t step_count() const { return step_; }
  const std::vector<double>& first_moment(std::size_t param_index) const { return m_.at(param_index); }
  const std::vector<double>& second_moment(std::size_t param_index) const { return v_.at(param_index); }
  const AdamWConfig& config() const { return config_; }

 private:
  AdamWConfig config_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::vector<double> lr_multiplier_;
};

// Constant learning rate with linear warmup over the first `warmup_frac` of
// steps and a single multiplicative drop once `drop_frac` of steps are done.
struct LrSchedule {
  double base_lr = 5e-4;
  std::size_t total_steps = 1;
  double warmup_frac = 0.1;
  double drop_frac = 0.7;
  double drop_factor = 0.1;

  double at(std::size_t step) const;
};

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
