#pragma once

#include <optional>
#include <string_view>

#include "tradescope/raster.hpp"

namespace tradescope {

enum class ResampleKernel { Area, Nearest, Bilinear, Bicubic, Lanczos3 };

std::string_view to_string(ResampleKernel kernel) noexcept;
std::optional<ResampleKernel> parse_resample_kernel(
    std::string_view text) noexcept;

/// Resizes to exactly (width, height) with pixel-centre alignment. Area
/// averaging integrates fractional source-pixel overlap; the interpolating
/// kernels use normalized weights and edge replication. No clamping.
Raster resize(const Raster& image, int width, int height,
              ResampleKernel kernel);

/// Single threaded twin of resize.
Raster resize_serial(const Raster& image, int width, int height,
                     ResampleKernel kernel);

/// Resizes to a new ground sampling distance. Output dims are
/// round(dims * gsd / target_gsd); the gsd field is updated.
Raster resample(const Raster& image, double target_gsd, ResampleKernel kernel);

/// Area averaging when shrinking, `up` otherwise.
ResampleKernel pick_kernel(int from, int to, ResampleKernel down,
                           ResampleKernel up) noexcept;

}  // namespace tradescope
