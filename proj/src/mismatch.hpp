#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "serial/propagation.hpp"

namespace serial::detail {

// Relative mismatch between what each arrow carries and what its head would
// send now; see ConvergenceReport.
template <class Arrows, class HeadValue, class Factor>
double arrow_mismatch(const Arrows& arrows, const std::vector<double>& weight, HeadValue&& head_value,
                      Factor&& factor) {
  double eps = 0.0;
  for (std::size_t a = 0; a < arrows.size(); ++a) {
    const double pending = head_value(arrows[a].head) * factor(arrows[a]) - weight[a];
    if (weight[a] != 0.0) {
      eps = std::max(eps, std::abs(pending / weight[a]));
    } else if (std::abs(pending) > kAbsoluteFloor) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return eps;
}

}  // namespace serial::detail
