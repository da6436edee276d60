#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swintrack/parameter.hpp"

namespace swintrack::inline SWINTRACK_PRECISION_NS {

struct ParameterGradError {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};

struct FdReport {
  double max_rel_error = 0.0;
  std::vector<ParameterGradError> per_parameter;
};

// Compares analytic gradients of `loss_fn` against central differences with
// step `h` on every coordinate of every parameter. The error of a coordinate
// is |analytic - numeric| / max(1, |numeric|). `loss_fn` must be
// deterministic and rebuild its graph on every call.
FdReport fd_check(const std::function<Tensor()>& loss_fn, ParameterSet& params, double h = 1e-3);

}  // namespace swintrack::inline SWINTRACK_PRECISION_NS
