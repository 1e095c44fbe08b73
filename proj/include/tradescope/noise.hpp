#pragma once

#include <cstdint>

#include "tradescope/raster.hpp"

namespace tradescope {

/// Equivalent well capacity W = 2 * snr50^2.
double well_capacity(double snr50);

/// Poisson mean for one intensity: (intensity * (2^bit - 1)) * W / 2^bit.
double photon_mean(double intensity, double snr50, int bit);

/// One Poisson variate per sample, in photoelectron counts. Exact sampling
/// below a mean of 30, rounded Gaussian N(mu, mu) above. Each row draws
/// from its own stream derived from `seed`, so results do not depend on the
/// thread count.
Raster poisson_counts(const Raster& image, double snr50, int bit,
                      std::uint64_t seed);
Raster poisson_counts_serial(const Raster& image, double snr50, int bit,
                             std::uint64_t seed);

/// Counts back to unit intensity: counts / W gives DN / 2^bit, which is then
/// rescaled by 2^bit / (2^bit - 1) and clamped to [0,1].
Raster normalize_counts(const Raster& counts, double snr50, int bit);

/// poisson_counts followed by normalize_counts.
Raster shot_noise(const Raster& image, double snr50, int bit,
                  std::uint64_t seed);

/// Stateless 64-bit mixer used for every derived seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) noexcept;

}  // namespace tradescope
