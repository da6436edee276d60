#include "swintrack/parameter.hpp"

#include <algorithm>
#include <stdexcept>

#include "swintrack/layers.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

Tensor ParameterSet::add(std::string name, Tensor tensor) {
  if (find(name) != nullptr) throw std::invalid_argument("duplicate parameter name: " + name);
  items_.push_back(Parameter{std::move(name), tensor});
  return tensor;
}

Tensor ParameterSet::add_zeros(std::string name, Shape shape) {
  return add(std::move(name), Tensor(std::move(shape), true));
}

Tensor ParameterSet::add_filled(std::string name, Shape shape, Scalar value) {
  Tensor t(std::move(shape), true);
  std::fill(t.mutable_data().begin(), t.mutable_data().end(), value);
  return add(std::move(name), t);
}

Tensor ParameterSet::add_truncated_normal(std::string name, Shape shape, Rng& rng, double stddev) {
  Tensor t(std::move(shape), true);
  for (Scalar& v : t.mutable_data()) v = static_cast<Scalar>(rng.truncated_normal(stddev));
  return add(std::move(name), t);
}

Tensor ParameterSet::add_normal(std::string name, Shape shape, Rng& rng, double stddev) {
  Tensor t(std::move(shape), true);
  for (Scalar& v : t.mutable_data()) v = static_cast<Scalar>(rng.normal(0.0, stddev));
  return add(std::move(name), t);
}

const Parameter* ParameterSet::find(std::string_view name) const {
  auto it = std::find_if(items_.begin(), items_.end(),
                         [&](const Parameter& p) { return p.name == name; });
  return it == items_.end() ? nullptr : &*it;
}

void ParameterSet::zero_grad() {
  for (Parameter& p : items_) p.tensor.zero_grad();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const Parameter& p : items_) n += p.tensor.numel();
  return n;
}

Linear Linear::create(ParameterSet& params, const std::string& prefix, std::size_t in,
                      std::size_t out, Rng& rng, double stddev) {
  return Linear{params.add_truncated_normal(prefix + ".weight", {in, out}, rng, stddev),
                params.add_zeros(prefix + ".bias", {out})};
}

LayerNormParams LayerNormParams::create(ParameterSet& params, const std::string& prefix,
                                        std::size_t channels) {
  return LayerNormParams{params.add_filled(prefix + ".gain", {channels}, Scalar{1}),
                         params.add_zeros(prefix + ".bias", {channels})};
}

FeedForward FeedForward::create(ParameterSet& params, const std::string& prefix,
                                std::size_t channels, std::size_t hidden, Rng& rng) {
  return FeedForward{Linear::create(params, prefix + ".fc1", channels, hidden, rng),
                     Linear::create(params, prefix + ".fc2", hidden, channels, rng)};
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
