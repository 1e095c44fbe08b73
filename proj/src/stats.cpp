#include "tradescope/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tradescope/error.hpp"

namespace tradescope {

namespace {

// Type-7 quantile via selection: only the two order statistics around
// h = (n - 1) p are located, the rest of the range stays unsorted.
double select_quantile(std::vector<double>& v, double p) {
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty range");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted[lo];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw ValidationError("box statistics of an empty group");
  std::vector<double> v(values.begin(), values.end());
  BoxStats s;
  s.n = static_cast<int>(v.size());
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  s.median = select_quantile(v, 0.5);
  s.q1 = select_quantile(v, 0.25);
  s.q3 = select_quantile(v, 0.75);
  return s;
}

}  // namespace tradescope
