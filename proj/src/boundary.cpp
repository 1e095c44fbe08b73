#include "tradescope/boundary.hpp"

namespace tradescope {

std::string_view to_string(Boundary boundary) noexcept {
  return boundary == Boundary::Reflect ? "reflect" : "replicate";
}

std::optional<Boundary> parse_boundary(std::string_view text) noexcept {
  if (text == "reflect") return Boundary::Reflect;
  if (text == "replicate") return Boundary::Replicate;
  return std::nullopt;
}

}  // namespace tradescope
