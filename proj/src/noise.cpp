#include "tradescope/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tradescope/error.hpp"

namespace tradescope {

namespace {

// Above this mean the Poisson draw is replaced by a rounded N(mu, mu).
constexpr double kGaussianThreshold = 30.0;

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void check_params(double snr50, int bit) {
  if (!(snr50 > 0.0) || !std::isfinite(snr50))
    throw ValidationError("snr50 must be positive");
  if (bit != 8 && bit != 16)
    throw ValidationError("bit depth must be 8 or 16, got " +
                          std::to_string(bit));
}

double draw(std::mt19937_64& rng, double mu) {
  if (mu <= 0.0) return 0.0;
  if (mu < kGaussianThreshold) {
    std::poisson_distribution<long> poisson(mu);
    return static_cast<double>(poisson(rng));
  }
  std::normal_distribution<double> normal(mu, std::sqrt(mu));
  return std::max(0.0, std::round(normal(rng)));
}

Raster counts_impl(const Raster& image, double snr50, int bit,
                   std::uint64_t seed, bool parallel) {
  check_params(snr50, bit);
  if (!within_unit_range(image))
    throw PipelineError("shot noise input outside [0,1]");
  const double full_scale = std::ldexp(1.0, bit) - 1.0;
  const double gain = well_capacity(snr50) / std::ldexp(1.0, bit);
  Raster out(image.width(), image.height(), image.channels(), image.gsd());
  const int rows = image.channels() * image.height();
  const int w = image.width();
#pragma omp parallel for schedule(static) if (parallel)
  for (int row = 0; row < rows; ++row) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(row)));
    const std::size_t offset = static_cast<std::size_t>(row) * w;
    const auto src = image.data().subspan(offset, w);
    auto dst = out.data().subspan(offset, w);
    for (int x = 0; x < w; ++x) {
      dst[x] = draw(rng, src[x] * full_scale * gain);
    }
  }
  return out;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ splitmix64(value));
}

double well_capacity(double snr50) {
  if (!(snr50 > 0.0) || !std::isfinite(snr50))
    throw ValidationError("snr50 must be positive and finite");
  return 2.0 * snr50 * snr50;
}

double photon_mean(double intensity, double snr50, int bit) {
  check_params(snr50, bit);
  const double dn = intensity * (std::ldexp(1.0, bit) - 1.0);
  return dn * well_capacity(snr50) / std::ldexp(1.0, bit);
}

Raster poisson_counts(const Raster& image, double snr50, int bit,
                      std::uint64_t seed) {
  return counts_impl(image, snr50, bit, seed, true);
}

Raster poisson_counts_serial(const Raster& image, double snr50, int bit,
                             std::uint64_t seed) {
  return counts_impl(image, snr50, bit, seed, false);
}

Raster normalize_counts(const Raster& counts, double snr50, int bit) {
  check_params(snr50, bit);
  const double levels = std::ldexp(1.0, bit);
  const double scale = levels / (well_capacity(snr50) * (levels - 1.0));
  Raster out = counts;
  for (double& v : out.data()) v = std::clamp(v * scale, 0.0, 1.0);
  return out;
}

Raster shot_noise(const Raster& image, double snr50, int bit,
                  std::uint64_t seed) {
  return normalize_counts(poisson_counts(image, snr50, bit, seed), snr50, bit);
}

}  // namespace tradescope
