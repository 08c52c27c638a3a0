#pragma once

#include <vector>

namespace krsel {

// Fixed-length real vector of (possibly noise-corrupted, possibly
// transformed) simulator output. `clamped` records that blow-up clamping
// fired somewhere upstream.
struct SummaryVector {
  std::vector<double> values;
  bool clamped = false;

  int dim() const { return static_cast<int>(values.size()); }
};

}  // namespace krsel
