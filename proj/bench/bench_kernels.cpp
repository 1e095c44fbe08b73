// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "tradescope/convolve.hpp"
#include "tradescope/edsr.hpp"
#include "tradescope/noise.hpp"
#include "tradescope/optics.hpp"
#include "tradescope/resample.hpp"

using namespace tradescope;

namespace {

Raster random_raster(int w, int h, int c) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Raster r(w, h, c, 0.6);
  for (double& v : r.data()) v = u(rng);
  return r;
}

const Psf& psf_small() {
  static const Psf psf = [] {
    Psf p;
    p.support = 9;
    p.pixel_scale = 0.6;
    double sum = 0.0;
    for (int y = -4; y <= 4; ++y)
      for (int x = -4; x <= 4; ++x) {
        p.kernel.push_back(std::exp(-(x * x + y * y) / 4.0));
        sum += p.kernel.back();
      }
    for (double& v : p.kernel) v /= sum;
    return p;
  }();
  return psf;
}

const Psf& psf_large() {
  static const Psf psf = psf_for_grd(2.6, OpticsSpec{}, 0.6);
  return psf;
}

void BM_ConvolveDirectSerial(benchmark::State& state) {
  const Raster img = random_raster(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_direct_serial(img, psf_small()));
}

void BM_ConvolveDirect(benchmark::State& state) {
  const Raster img = random_raster(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_direct(img, psf_small()));
}

void BM_ConvolveFft(benchmark::State& state) {
  const Raster img = random_raster(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_fft(img, psf_small()));
}

void BM_ConvolveDirectLargeKernel(benchmark::State& state) {
  const Raster img = random_raster(240, 240, 3);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_direct(img, psf_large()));
}

void BM_ConvolveFftLargeKernel(benchmark::State& state) {
  const Raster img = random_raster(240, 240, 3);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_fft(img, psf_large()));
}

void BM_ResizeSerial(benchmark::State& state) {
  const Raster img = random_raster(120, 120, 3);
  const auto k = static_cast<ResampleKernel>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(resize_serial(img, 240, 240, k));
}

void BM_Resize(benchmark::State& state) {
  const Raster img = random_raster(120, 120, 3);
  const auto k = static_cast<ResampleKernel>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(resize(img, 240, 240, k));
}

void BM_PoissonSerial(benchmark::State& state) {
  const Raster img = random_raster(240, 240, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(poisson_counts_serial(img, static_cast<double>(state.range(0)), 8, 7));
}

void BM_Poisson(benchmark::State& state) {
  const Raster img = random_raster(240, 240, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(poisson_counts(img, static_cast<double>(state.range(0)), 8, 7));
}

edsr::FeatureMap feature_map(int size, int channels) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  edsr::FeatureMap m(size, size, channels);
  for (double& v : m.data) v = n(rng);
  return m;
}

void BM_Conv2dSerial(benchmark::State& state) {
  const auto in = feature_map(64, 32);
  edsr::ConvLayer layer(32, 32, 3);
  for (auto _ : state) benchmark::DoNotOptimize(edsr::conv2d_serial(in, layer));
}

void BM_Conv2d(benchmark::State& state) {
  const auto in = feature_map(64, 32);
  edsr::ConvLayer layer(32, 32, 3);
  for (auto _ : state) benchmark::DoNotOptimize(edsr::conv2d(in, layer));
}

}  // namespace

BENCHMARK(BM_ConvolveDirectSerial)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveDirect)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveFft)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveDirectLargeKernel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolveFftLargeKernel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResizeSerial)
    ->Arg(static_cast<int>(ResampleKernel::Bicubic))
    ->Arg(static_cast<int>(ResampleKernel::Lanczos3))
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Resize)
    ->Arg(static_cast<int>(ResampleKernel::Bicubic))
    ->Arg(static_cast<int>(ResampleKernel::Lanczos3))
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PoissonSerial)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Poisson)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv2dSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv2d)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
