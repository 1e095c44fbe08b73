#include "tradescope/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tradescope/convolve.hpp"
#include "tradescope/error.hpp"
#include "tradescope/noise.hpp"

namespace tradescope {

namespace {

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

StageRecord record(const char* name, const Raster& r) {
  return {name, r.width(), r.height(), r.channels(), checksum(r)};
}

Raster resample_to(const Raster& image, double target_gsd,
                   const DegradeSpec& spec) {
  const ResampleKernel kernel = target_gsd > image.gsd() ? spec.resample_down
                                                         : spec.resample_up;
  return resample(image, target_gsd, kernel);
}

}  // namespace

double DegradeSpec::effective_sensor_gsd() const {
  return gsd_sensor ? std::max(gsd_product, *gsd_sensor) : gsd_product;
}

double DegradeSpec::well_capacity() const {
  return tradescope::well_capacity(snr50);
}

void DegradeSpec::validate() const {
  if (!positive(gsd_original)) throw ValidationError("gsd_original must be positive");
  if (gsd_sensor && !positive(*gsd_sensor))
    throw ValidationError("gsd_sensor must be positive");
  if (!positive(gsd_product)) throw ValidationError("gsd_product must be positive");
  if (!positive(grd)) throw ValidationError("grd must be positive");
  if (!positive(snr50)) throw ValidationError("snr50 must be positive");
  if (bit != 8 && bit != 16) throw ValidationError("bit must be 8 or 16");
  if (psf_grid < 16 || psf_grid % 2 != 0)
    throw ValidationError("psf_grid must be even and at least 16");
}

DegradedRaster degrade(const Raster& image, const DegradeSpec& spec,
                       const OpticsSpec& optics) {
  spec.validate();
  if (std::abs(image.gsd() - spec.gsd_original) > 1e-9 * spec.gsd_original)
    throw ValidationError("image gsd " + std::to_string(image.gsd()) +
                          " m does not match gsd_original " +
                          std::to_string(spec.gsd_original) + " m");

  DegradedRaster result;
  result.spec = spec;
  const Psf psf = psf_for_grd(spec.grd, optics, image.gsd(), spec.psf_grid);

  Raster blurred = clamp_unit(blur(image, psf, spec.boundary));
  result.stage_log.push_back(record(kStageNames[0], blurred));

  Raster sensor = clamp_unit(
      resample_to(blurred, spec.effective_sensor_gsd(), spec));
  result.stage_log.push_back(record(kStageNames[1], sensor));

  const Raster counts = poisson_counts(sensor, spec.snr50, spec.bit, spec.seed);
  result.stage_log.push_back(record(kStageNames[2], counts));

  const Raster sampled = normalize_counts(counts, spec.snr50, spec.bit);
  result.stage_log.push_back(record(kStageNames[3], sampled));

  result.raster = clamp_unit(resample_to(sampled, spec.gsd_product, spec));
  result.stage_log.push_back(record(kStageNames[4], result.raster));
  return result;
}

}  // namespace tradescope
