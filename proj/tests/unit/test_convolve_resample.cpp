#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "tradescope/boundary.hpp"
#include "tradescope/convolve.hpp"
#include "tradescope/error.hpp"
#include "tradescope/iqa.hpp"
#include "tradescope/resample.hpp"

using namespace tradescope;

namespace {

Psf random_kernel(int support, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Psf psf;
  psf.support = support;
  psf.kernel.resize(static_cast<std::size_t>(support) * support);
  double sum = 0.0;
  for (double& v : psf.kernel) sum += (v = u(rng));
  for (double& v : psf.kernel) v /= sum;
  return psf;
}

double max_diff(const Raster& a, const Raster& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

}  // namespace

TEST_CASE("fold_index") {
  CHECK(fold_index(-1, 5, Boundary::Reflect) == 0);
  CHECK(fold_index(-2, 5, Boundary::Reflect) == 1);
  CHECK(fold_index(5, 5, Boundary::Reflect) == 4);
  CHECK(fold_index(11, 5, Boundary::Reflect) == 1);
  CHECK(fold_index(-7, 2, Boundary::Reflect) == oracle::mirror(-7, 2));
  CHECK(fold_index(-3, 5, Boundary::Replicate) == 0);
  CHECK(fold_index(9, 5, Boundary::Replicate) == 4);
  for (int i = -40; i < 40; ++i) CHECK(fold_index(i, 3, Boundary::Reflect) == oracle::mirror(i, 3));
}

TEST_CASE("delta kernel is the identity") {
  const Raster img = oracle::random_raster(13, 9, 3, 4);
  Psf delta;
  delta.support = 3;
  delta.kernel = {0, 0, 0, 0, 1, 0, 0, 0, 0};
  CHECK(convolve_direct(img, delta) == img);
  CHECK(max_diff(convolve_fft(img, delta), img) <= 1e-12);
}

TEST_CASE("direct, parallel and fft routes match the brute-force oracle") {
  // Asymmetric kernels expose any flip of the convolution orientation.
  for (int support : {1, 3, 5, 7, 21}) {
    for (Boundary b : {Boundary::Reflect, Boundary::Replicate}) {
      const Raster img = oracle::random_raster(16 + support % 5, 16, 3,
                                               static_cast<std::uint64_t>(support));
      const Psf psf = random_kernel(support, 100 + support);
      const Raster expected = oracle::convolve(img, psf, b == Boundary::Reflect);
      CHECK(max_diff(convolve_direct_serial(img, psf, b), expected) <= 1e-9);
      CHECK(max_diff(convolve_direct(img, psf, b), expected) <= 1e-9);
      CHECK(max_diff(convolve_fft(img, psf, b), expected) <= 1e-9);
      CHECK(convolve_direct(img, psf, b) == convolve_direct_serial(img, psf, b));
    }
  }
}

TEST_CASE("kernel wider than the image still folds correctly") {
  const Raster img = oracle::random_raster(4, 3, 1, 8);
  const Psf psf = random_kernel(11, 3);
  const Raster expected = oracle::convolve(img, psf, true);
  CHECK(max_diff(convolve_direct(img, psf), expected) <= 1e-9);
  CHECK(max_diff(convolve_fft(img, psf), expected) <= 1e-9);
}

TEST_CASE("blur rejects a psf sampled at another scale") {
  const Raster img = oracle::random_raster(8, 8, 1, 1, 0.6);
  Psf psf = random_kernel(3, 1);
  psf.pixel_scale = 1.2;
  CHECK_THROWS_AS(blur(img, psf), ValidationError);
  psf.pixel_scale = 0.6;
  CHECK_NOTHROW(blur(img, psf));
}

TEST_CASE("resample to the same gsd is the identity") {
  const Raster img = oracle::random_raster(12, 10, 3, 2, 0.6);
  for (ResampleKernel k : {ResampleKernel::Area, ResampleKernel::Bicubic,
                           ResampleKernel::Lanczos3})
    CHECK(resample(img, 0.6, k) == img);
}

TEST_CASE("area downsample of a checkerboard is flat grey") {
  Raster board(16, 16, 1, 0.6);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) board.at(x, y) = (x + y) % 2;
  const Raster out = resample(board, 1.2, ResampleKernel::Area);
  CHECK(out.width() == 8);
  CHECK(out.gsd() == 1.2);
  for (double v : out.data()) CHECK(std::abs(v - 0.5) <= 1e-15);
}

TEST_CASE("area downsample by 3 is the block mean") {
  const Raster img = oracle::random_raster(9, 6, 1, 17, 0.6);
  const Raster out = resample(img, 1.8, ResampleKernel::Area);
  REQUIRE(out.width() == 3);
  REQUIRE(out.height() == 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) {
      double m = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) m += img.at(3 * x + i, 3 * y + j);
      CHECK(std::abs(out.at(x, y) - m / 9.0) <= 1e-12);
    }
}

TEST_CASE("interpolators reproduce constants and nearest replicates") {
  Raster flat(7, 5, 3, 1.0);
  for (double& v : flat.data()) v = 0.42;
  for (ResampleKernel k : {ResampleKernel::Nearest, ResampleKernel::Bilinear,
                           ResampleKernel::Bicubic, ResampleKernel::Lanczos3,
                           ResampleKernel::Area}) {
    for (auto [w, h] : {std::pair{14, 10}, std::pair{21, 15}, std::pair{3, 2}}) {
      const Raster out = resize(flat, w, h, k);
      for (double v : out.data()) CHECK(std::abs(v - 0.42) <= 1e-9);
    }
  }
  Raster one(1, 1, 1, 1.0);
  one.at(0, 0) = 0.3;
  const Raster up = resize(one, 2, 2, ResampleKernel::Nearest);
  for (double v : up.data()) CHECK(v == 0.3);
}

TEST_CASE("interpolators follow a smooth ramp better than nearest") {
  Raster ramp(32, 32, 1, 1.0);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      ramp.at(x, y) = 0.5 + 0.4 * std::sin(0.2 * x) * std::cos(0.15 * y);
  const Raster small = resize(ramp, 16, 16, ResampleKernel::Area);
  const double nearest = mse(ramp, resize(small, 32, 32, ResampleKernel::Nearest));
  const double bicubic = mse(ramp, resize(small, 32, 32, ResampleKernel::Bicubic));
  const double lanczos = mse(ramp, resize(small, 32, 32, ResampleKernel::Lanczos3));
  CHECK(bicubic < nearest);
  CHECK(lanczos < nearest);
}

TEST_CASE("parallel resize matches the serial reference") {
  const Raster img = oracle::random_raster(23, 17, 3, 5);
  for (ResampleKernel k : {ResampleKernel::Area, ResampleKernel::Nearest,
                           ResampleKernel::Bilinear, ResampleKernel::Bicubic,
                           ResampleKernel::Lanczos3}) {
    CHECK(resize(img, 46, 34, k) == resize_serial(img, 46, 34, k));
    CHECK(resize(img, 8, 6, k) == resize_serial(img, 8, 6, k));
  }
}

TEST_CASE("kernel names") {
  CHECK(parse_resample_kernel("lanczos3") == ResampleKernel::Lanczos3);
  CHECK_FALSE(parse_resample_kernel("spline").has_value());
  CHECK(to_string(ResampleKernel::Area) == "area");
  CHECK(pick_kernel(10, 5, ResampleKernel::Area, ResampleKernel::Bicubic) ==
        ResampleKernel::Area);
  CHECK(pick_kernel(5, 10, ResampleKernel::Area, ResampleKernel::Bicubic) ==
        ResampleKernel::Bicubic);
}
