#include "swintrack/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

double global_grad_norm(const ParameterSet& params) {
  double sq = 0.0;
  for (const Parameter& p : params.items()) {
    for (Scalar g : p.tensor.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(sq);
}

double clip_grad_norm(ParameterSet& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (Parameter& p : params.items()) {
      for (Scalar& g : p.tensor.mutable_grad()) g = static_cast<Scalar>(g * factor);
    }
  }
  return norm;
}

AdamW::AdamW(const ParameterSet& params, AdamWConfig config) : config_(config) {
  for (const Parameter& p : params.items()) {
    m_.emplace_back(p.tensor.numel(), 0.0);
    v_.emplace_back(p.tensor.numel(), 0.0);
  }
  lr_multiplier_.assign(params.size(), 1.0);
}

void AdamW::set_lr_multiplier(const ParameterSet& params, std::string_view prefix,
                              double multiplier) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params.items()[i].name.starts_with(prefix)) lr_multiplier_[i] = multiplier;
  }
}

double AdamW::step(ParameterSet& params, double lr, double grad_clip_norm) {
  if (params.size() != m_.size()) {
    throw std::logic_error("AdamW: parameter set changed since construction");
  }
  for (const Parameter& p : params.items()) {
    for (Scalar g : p.tensor.grad()) {
      if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient in parameter " + p.name);
    }
  }
  const double norm = clip_grad_norm(params, grad_clip_norm);

  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = params.items()[i].tensor;
    const double rate = lr * lr_multiplier_[i];
    auto w = t.mutable_data();
    const auto grad = t.grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double g = grad[k];
      m[k] = b1 * m[k] + (1.0 - b1) * g;
      v[k] = b2 * v[k] + (1.0 - b2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      double value = static_cast<double>(w[k]);
      value -= rate * config_.weight_decay * value;
      value -= rate * m_hat / (std::sqrt(v_hat) + config_.eps);
      w[k] = static_cast<Scalar>(value);
    }
  }
  return norm;
}

double LrSchedule::at(std::size_t step) const {
  const double total = static_cast<double>(total_steps);
  const double warmup_steps = std::floor(warmup_frac * total);
  double lr = base_lr;
  if (warmup_steps > 0.0 && static_cast<double>(step) < warmup_steps) {
    lr *= (static_cast<double>(step) + 1.0) / warmup_steps;
  }
  if (static_cast<double>(step) >= std::floor(drop_frac * total)) lr *= drop_factor;
  return lr;
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
