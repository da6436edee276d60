#include "swintrack/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace swintrack::inline SWINTRACK_PRECISION_NS {

FdReport fd_check(const std::function<Tensor()>& loss_fn, ParameterSet& params, double h) {
  params.zero_grad();
  backward(loss_fn());
  std::vector<std::vector<Scalar>> analytic;
  for (const Parameter& p : params.items()) {
    analytic.emplace_back(p.tensor.grad().begin(), p.tensor.grad().end());
  }

  FdReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.items()[i];
    ParameterGradError entry{p.name, 0.0, 0};
    auto w = p.tensor.mutable_data();
    for (std::size_t k = 0; k < w.size(); ++k) {
      const Scalar original = w[k];
      w[k] = static_cast<Scalar>(original + h);
      const double plus = loss_fn().item();
      w[k] = static_cast<Scalar>(original - h);
      const double minus = loss_fn().item();
      w[k] = original;
      const double numeric = (plus - minus) / (2.0 * h);
      const double err =
          std::abs(static_cast<double>(analytic[i][k]) - numeric) / std::max(1.0, std::abs(numeric));
      if (err > entry.max_rel_error) {
        entry.max_rel_error = err;
        entry.worst_index = k;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.per_parameter.push_back(std::move(entry));
  }
  params.zero_grad();
  return report;
}

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
