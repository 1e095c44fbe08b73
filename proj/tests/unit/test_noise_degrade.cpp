#include <doctest.h>

#include <cmath>
#include <string>

#include "../oracles.hpp"
#include "tradescope/convolve.hpp"
#include "tradescope/corpus.hpp"
#include "tradescope/degrade.hpp"
#include "tradescope/error.hpp"
#include "tradescope/iqa.hpp"
#include "tradescope/noise.hpp"

using namespace tradescope;

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const Raster& r) {
  double s = 0.0, ss = 0.0;
  for (double v : r.data()) s += v;
  const double n = static_cast<double>(r.size());
  const double mean = s / n;
  for (double v : r.data()) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

Raster constant(int w, int h, double v, double gsd = 1.0) {
  Raster r(w, h, 1, gsd);
  for (double& x : r.data()) x = v;
  return r;
}

}  // namespace

TEST_CASE("well capacity and photon mean") {
  CHECK(well_capacity(10) == 200.0);
  CHECK(well_capacity(50) == 5000.0);
  CHECK(photon_mean(128.0 / 255.0, 10, 8) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_THROWS_AS(well_capacity(0.0), ValidationError);
}

TEST_CASE("half-range calibration: mean/std tracks snr50") {
  const Raster half = constant(1000, 1000, 0.5);
  for (double snr : {10.0, 50.0, 100.0}) {
    const Raster counts = poisson_counts(half, snr, 8, 11);
    const Moments m = moments(counts);
    const double mu = photon_mean(0.5, snr, 8);
    CHECK(std::abs(m.mean / mu - 1.0) <= 0.01);
    CHECK(std::abs(m.mean / m.sd / snr - 1.0) <= 0.01);
    // Three standard errors of the sample mean.
    CHECK(std::abs(m.mean - mu) <= 3.0 * std::sqrt(mu / counts.size()));

    const Moments n = moments(shot_noise(half, snr, 8, 11));
    CHECK(std::abs(n.mean / n.sd / snr - 1.0) <= 0.01);
    CHECK(std::abs(n.mean - 0.5) <= 0.01 * 0.5);
  }
}

TEST_CASE("low-count regime is exact Poisson") {
  // Mean 4.98 counts: variance must equal the mean.
  const Raster dim = constant(1000, 1000, 0.01);
  const Raster counts = poisson_counts(dim, 10, 8, 3);
  const Moments m = moments(counts);
  const double mu = photon_mean(0.01, 10, 8);
  CHECK(std::abs(m.mean / mu - 1.0) <= 0.01);
  CHECK(std::abs(m.sd * m.sd / mu - 1.0) <= 0.02);
  for (double v : counts.data()) CHECK(v == std::floor(v));
}

TEST_CASE("noise is seeded and independent of thread count") {
  const Raster img = oracle::random_raster(64, 48, 3, 1);
  CHECK(poisson_counts(img, 20, 8, 9) == poisson_counts_serial(img, 20, 8, 9));
  CHECK(poisson_counts(img, 20, 8, 9) == poisson_counts(img, 20, 8, 9));
  CHECK_FALSE(poisson_counts(img, 20, 8, 9) == poisson_counts(img, 20, 8, 10));
  const Raster out = shot_noise(img, 20, 8, 9);
  CHECK(within_unit_range(out));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
}

TEST_CASE("normalize maps the mean back to the input level") {
  Raster counts(1, 1, 1, 1.0);
  counts.at(0, 0) = photon_mean(0.25, 30, 16);
  CHECK(normalize_counts(counts, 30, 16).at(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("degrade logs five stages and is deterministic") {
  const Raster crop = synthetic_crop(Geography::Urban, 1, 96, 0.6, 5);
  DegradeSpec spec;
  spec.gsd_product = 1.8;
  spec.grd = 1.9;
  spec.snr50 = 30;
  spec.seed = 7;
  const DegradedRaster a = degrade(crop, spec, OpticsSpec{});
  const DegradedRaster b = degrade(crop, spec, OpticsSpec{});
  CHECK(a.raster == b.raster);
  REQUIRE(a.stage_log.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.stage_log[i].name == kStageNames[i]);
    CHECK(a.stage_log[i].checksum == b.stage_log[i].checksum);
  }
  CHECK(a.raster.width() == 32);
  CHECK(a.raster.gsd() == doctest::Approx(1.8));
  CHECK(a.stage_log[0].width == 96);
  CHECK(a.stage_log[1].width == 32);

  spec.seed = 8;
  CHECK_FALSE(degrade(crop, spec, OpticsSpec{}).raster == a.raster);
}

TEST_CASE("sensor gsd defaults to the product gsd") {
  DegradeSpec spec;
  spec.gsd_product = 2.4;
  CHECK(spec.effective_sensor_gsd() == 2.4);
  spec.gsd_sensor = 3.0;
  CHECK(spec.effective_sensor_gsd() == 3.0);
  spec.gsd_sensor = 1.2;
  CHECK(spec.effective_sensor_gsd() == 2.4);

  const Raster crop = synthetic_crop(Geography::Rural, 1, 96, 0.6, 5);
  spec.grd = 2.6;
  spec.gsd_sensor = 3.0;
  const DegradedRaster d = degrade(crop, spec, OpticsSpec{});
  CHECK(d.stage_log[1].width == 19);
  CHECK(d.raster.width() == 24);
}

TEST_CASE("noise-free limit reproduces the blurred input") {
  const Raster crop = synthetic_crop(Geography::Forest, 1, 96, 0.6, 5);
  DegradeSpec spec;
  spec.gsd_product = 0.6;
  spec.grd = 1.2;
  spec.snr50 = 1e6;
  const DegradedRaster d = degrade(crop, spec, OpticsSpec{});
  const Raster blurred = blur(crop, psf_for_grd(1.2, OpticsSpec{}, 0.6));
  CHECK(ssim_global(blurred, d.raster) > 0.999);
}

TEST_CASE("degrade validates its inputs") {
  const Raster crop = synthetic_crop(Geography::Beach, 1, 48, 0.6, 5);
  DegradeSpec spec;
  spec.snr50 = 0;
  CHECK_THROWS_AS(degrade(crop, spec, OpticsSpec{}), ValidationError);
  spec = DegradeSpec{};
  spec.bit = 7;
  CHECK_THROWS_AS(degrade(crop, spec, OpticsSpec{}), ValidationError);
  spec = DegradeSpec{};
  spec.grd = 1.0;
  CHECK_THROWS_AS(degrade(crop, spec, OpticsSpec{}), ValidationError);
  spec = DegradeSpec{};
  spec.gsd_original = 0.5;
  CHECK_THROWS_AS(degrade(crop, spec, OpticsSpec{}), ValidationError);
}
