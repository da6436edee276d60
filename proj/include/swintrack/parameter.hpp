#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "swintrack/random.hpp"
#include "swintrack/tensor.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

struct Parameter {
  std::string name;  // dotted path, e.g. "fusion.encoder.block1.attn.wq.weight"
  Tensor tensor;
};

// Owns the registry of trainable tensors of one model. Names are unique.
class ParameterSet {
 public:
  Tensor add_zeros(std::string name, Shape shape);
  Tensor add_filled(std::string name, Shape shape, Scalar value);
  // Normal(0, stddev) truncated at two standard deviations.
  Tensor add_truncated_normal(std::string name, Shape shape, Rng& rng, double stddev);
  Tensor add_normal(std::string name, Shape shape, Rng& rng, double stddev);

  const std::vector<Parameter>& items() const { return items_; }
  std::vector<Parameter>& items() { return items_; }
  const Parameter* find(std::string_view name) const;

  void zero_grad();
  // Number of scalar weights over all parameters.
  std::size_t scalar_count() const;
  std::size_t size() const { return items_.size(); }

 private:
  Tensor add(std::string name, Tensor tensor);

  std::vector<Parameter> items_;
};

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
