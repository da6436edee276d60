#pragma once

#include <string>

// Precision-sensitive acceptance checks, compiled against the double build.
namespace swintrack::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome permutation_contract();
Outcome pe_one_row_reduction();
Outcome fusion_bias_oracle();
Outcome loss_values();
Outcome metric_oracle();

}  // namespace swintrack::acceptance
