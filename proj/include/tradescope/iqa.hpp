#pragma once

#include <limits>
#include <string>

#include "tradescope/raster.hpp"

namespace tradescope {

/// PSNR reported for identical images; written as "inf" in CSV.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct MetricRecord {
  double mse = 0.0;
  double psnr = kInfinitePsnr;  // dB
  double ssim_global = 1.0;
  double ssim_windowed = 1.0;
  std::string reference_id;
  std::string candidate_id;
};

/// Resamples `candidate` (bicubic) onto the reference pixel grid. Both must
/// cover the same ground extent to within one reference pixel.
Raster align_for_metric(const Raster& candidate, const Raster& reference);

double mse(const Raster& reference, const Raster& candidate);

double psnr_from_mse(double mse, double peak = 1.0);

/// 10 log10(peak^2 / MSE); kInfinitePsnr when MSE == 0.
double psnr(const Raster& reference, const Raster& candidate,
            double peak = 1.0);

/// Structural similarity evaluated once over the whole image per channel,
/// averaged over channels. C1 = (0.01 peak)^2, C2 = (0.03 peak)^2.
double ssim_global(const Raster& reference, const Raster& candidate,
                   double peak = 1.0);

/// Mean SSIM over every valid 11x11 Gaussian (sigma 1.5) window.
double ssim_windowed(const Raster& reference, const Raster& candidate,
                     double peak = 1.0);

MetricRecord evaluate(const Raster& reference, const Raster& candidate,
                      std::string reference_id = {},
                      std::string candidate_id = {});

}  // namespace tradescope
