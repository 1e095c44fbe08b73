#pragma once

#include <optional>
#include <string_view>

namespace tradescope {

/// How samples outside an image are synthesized.
enum class Boundary {
  Reflect,    // half-sample symmetric: -1 -> 0, -2 -> 1, n -> n-1
  Replicate,  // clamp to the nearest edge sample
};

std::string_view to_string(Boundary boundary) noexcept;
std::optional<Boundary> parse_boundary(std::string_view text) noexcept;

/// Maps any integer coordinate onto [0, n). Reflection folds repeatedly, so
/// offsets larger than the image are well defined.
inline int fold_index(int i, int n, Boundary boundary) noexcept {
  if (i >= 0 && i < n) return i;
  if (boundary == Boundary::Replicate) return i < 0 ? 0 : n - 1;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace tradescope
