#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swintrack/config.hpp"

namespace swintrack {

inline constexpr double kGradcheckTolerance = 1e-3;

struct GradcheckGroup {
  std::string name;
  std::size_t parameters = 0;
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
  std::string worst_parameter;
};

struct GradcheckResult {
  std::vector<GradcheckGroup> groups;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  double seconds = 0.0;
  bool passed() const { return max_rel_error < kGradcheckTolerance; }
};

// C=16, N=2, two heads, 32 px template and 64 px search crops.
ModelConfig gradcheck_model_config();

// Module group a parameter name belongs to, e.g. "fusion.encoder".
std::string parameter_group(const std::string& name);

// Central-difference check of the total training loss of one synthetic pair,
// in 64-bit arithmetic, over every coordinate of every parameter.
// `corrupt_backward` routes the classification scores through an identity
// whose backward pass is wrong, as a negative control.
GradcheckResult run_model_gradcheck(const ModelConfig& config, std::uint64_t seed,
                                    bool corrupt_backward = false);

}  // namespace swintrack
