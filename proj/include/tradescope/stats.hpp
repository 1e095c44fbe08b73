#pragma once

#include <span>

namespace tradescope {

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  int n = 0;
};

/// Linear-interpolation quantile (type 7) of an ascending sorted range.
double quantile_sorted(std::span<const double> sorted, double p);

/// Five-number summary using type-7 quartiles. Throws on an empty input.
BoxStats box_stats(std::span<const double> values);

}  // namespace tradescope
