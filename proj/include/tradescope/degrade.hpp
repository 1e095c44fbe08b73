#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tradescope/boundary.hpp"
#include "tradescope/optics.hpp"
#include "tradescope/raster.hpp"
#include "tradescope/resample.hpp"

namespace tradescope {

/// One degradation configuration.
struct DegradeSpec {
  double gsd_original = 0.6;
  // Unset: the sensor grid equals the product grid. Set: the sensor grid is
  // max(gsd_product, value), so `3.0` reproduces a coarse 3 m sensor.
  std::optional<double> gsd_sensor;
  double gsd_product = 1.2;
  double grd = 1.2;
  double snr50 = 50.0;
  int bit = 8;
  std::uint64_t seed = 0;
  ResampleKernel resample_down = ResampleKernel::Area;
  ResampleKernel resample_up = ResampleKernel::Bicubic;
  Boundary boundary = Boundary::Reflect;
  int psf_grid = 128;

  double effective_sensor_gsd() const;
  double well_capacity() const;
  void validate() const;
};

struct StageRecord {
  std::string name;
  int width = 0;
  int height = 0;
  int channels = 0;
  std::uint64_t checksum = 0;
};

inline constexpr const char* kStageNames[] = {
    "blur", "resample_sensor", "shot_noise", "normalize", "resample_product"};

struct DegradedRaster {
  Raster raster;
  DegradeSpec spec;
  std::vector<StageRecord> stage_log;
};

/// blur(psf_for_grd) -> resample(sensor) -> Poisson counts -> normalize ->
/// resample(product). Deterministic for a given spec.seed.
DegradedRaster degrade(const Raster& image, const DegradeSpec& spec,
                       const OpticsSpec& optics);

}  // namespace tradescope
