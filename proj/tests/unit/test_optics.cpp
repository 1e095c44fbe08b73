#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "tradescope/convolve.hpp"
#include "tradescope/error.hpp"
#include "tradescope/optics.hpp"

using namespace tradescope;

TEST_CASE("grd from aperture") {
  OpticsSpec spec;
  CHECK(std::abs(grd_from_aperture(spec) - 1.22) <= 1e-12 * 1.22);
  spec.aperture_diameter = 0.56;
  CHECK(std::abs(grd_from_aperture(spec) - 0.61) <= 1e-12);
}

TEST_CASE("aperture from grd") {
  CHECK(std::abs(aperture_from_grd(1.22, 560e-9, 500e3) - 0.28) <= 1e-15);
  CHECK(std::abs(aperture_from_grd(1.2, 560e-9, 500e3) -
                 1.22 * 560e-9 * 500e3 / 1.2) <= 1e-15);
  CHECK(aperture_from_grd(1.2, 560e-9, 500e3) == doctest::Approx(0.284667).epsilon(1e-6));
  CHECK(aperture_from_grd(2.6, 560e-9, 500e3) == doctest::Approx(0.131385).epsilon(1e-6));
  CHECK(aperture_from_grd(1e9, 560e-9, 500e3) < 1e-9);
  for (double d = 0.05; d <= 1.0; d += 0.05) {
    OpticsSpec s;
    s.aperture_diameter = d;
    CHECK(std::abs(aperture_from_grd(grd_from_aperture(s), s.wavelength,
                                     s.altitude) - d) <= 1e-12 * d);
  }
  CHECK_THROWS_AS(aperture_from_grd(0.0, 560e-9, 500e3), ValidationError);
}

TEST_CASE("pupil mask geometry") {
  const PupilMask p = pupil_mask(256, 0.4);
  const int c = 128;
  CHECK(p.at(c, c) == 0.0);
  CHECK(p.at(c + static_cast<int>(0.7 * p.outer_radius), c) == 1.0);

  const PupilMask open = pupil_mask(256, 0.0);
  double annulus = 0.0, disk = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    annulus += p.values[i];
    disk += open.values[i];
  }
  CHECK(annulus / disk == doctest::Approx(0.84).epsilon(0.01));
  CHECK_THROWS_AS(pupil_mask(32, 0.4), ValidationError);
  CHECK_THROWS_AS(pupil_mask(65, 0.4), ValidationError);
}

TEST_CASE("mtf equals direct overlap autocorrelation") {
  for (double obscuration : {0.0, 0.4}) {
    const PupilMask p = pupil_mask(64, obscuration);
    const Mtf mtf = mtf_from_pupil(p);
    const auto direct = oracle::autocorrelation(p);
    const double peak = direct[32 * 64 + 32];
    double worst = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i)
      worst = std::max(worst, std::abs(mtf.values[i] - direct[i] / peak));
    CHECK(worst <= 1e-9);
    CHECK(mtf.at(32, 32) == 1.0);
    CHECK(mtf.at(0, 32) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out_of_band_fraction(mtf) < 1e-3);
  }
}

TEST_CASE("ideal mtf gives a delta kernel") {
  Mtf flat;
  flat.grid_n = 32;
  flat.values.assign(32 * 32, 1.0);
  flat.cutoff_bins = 32;
  const Psf psf = psf_from_mtf(flat);
  CHECK(psf.at(psf.radius(), psf.radius()) >= 0.999);
}

TEST_CASE("psf unit sum and centrosymmetry") {
  const OpticsSpec spec;
  for (double grd : {1.2, 1.55, 1.9, 2.25, 2.6}) {
    const Psf psf = psf_for_grd(grd, spec, 0.6);
    CHECK(psf.support % 2 == 1);
    double sum = 0.0;
    for (double v : psf.kernel) {
      sum += v;
      CHECK(v >= 0.0);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    for (int y = 0; y < psf.support; ++y)
      for (int x = 0; x < psf.support; ++x)
        CHECK(psf.at(x, y) ==
              psf.at(psf.support - 1 - x, psf.support - 1 - y));
  }
}

TEST_CASE("psf widens with grd") {
  const OpticsSpec spec;
  double previous = 0.0;
  for (double grd : {1.2, 1.55, 1.9, 2.25, 2.6}) {
    const double r = second_moment_radius(psf_for_grd(grd, spec, 0.6));
    CHECK(r > previous);
    previous = r;
  }
}

TEST_CASE("nyquist gate") {
  const OpticsSpec spec;
  CHECK_NOTHROW(psf_for_grd(1.2, spec, 0.6));
  CHECK_THROWS_AS(psf_for_grd(1.19, spec, 0.6), ValidationError);
  CHECK_NOTHROW(psf_for_grd(2.4, spec, 1.2));
  CHECK_THROWS_AS(psf_for_grd(2.3, spec, 1.2), ValidationError);
}

TEST_CASE("psf_for_grd keeps a constant image constant") {
  const OpticsSpec spec;
  Raster flat(48, 40, 3, 0.6);
  for (double& v : flat.data()) v = 0.37;
  for (double grd : {1.2, 1.9, 2.6}) {
    const Raster out = blur(flat, psf_for_grd(grd, spec, 0.6));
    for (double v : out.data()) CHECK(std::abs(v - 0.37) <= 1e-6);
  }
}

TEST_CASE("optics spec validation") {
  OpticsSpec spec;
  spec.obscuration = 1.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = OpticsSpec{};
  spec.wavelength = -1;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}
