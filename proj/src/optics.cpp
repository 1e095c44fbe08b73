#include "tradescope/optics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "tradescope/error.hpp"

namespace tradescope {

namespace {

constexpr double kRayleigh = 1.22;

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

// Moves the zero-frequency sample between index 0 and index n/2 (n even, so
// the shift is its own inverse).
template <typename T>
void swap_quadrants(std::span<T> values, int n) {
  const int h = n / 2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < n; ++x) {
      const int xs = (x + h) % n;
      std::swap(values[y * n + x], values[(y + h) * n + xs]);
    }
  }
}

}  // namespace

void OpticsSpec::validate() const {
  if (!positive(wavelength)) throw ValidationError("wavelength must be positive");
  if (!positive(altitude)) throw ValidationError("altitude must be positive");
  if (!positive(aperture_diameter))
    throw ValidationError("aperture diameter must be positive");
  if (!(obscuration >= 0.0 && obscuration < 1.0))
    throw ValidationError("obscuration must lie in [0, 1)");
}

double grd_from_aperture(const OpticsSpec& spec) {
  spec.validate();
  return kRayleigh * spec.wavelength * spec.altitude / spec.aperture_diameter;
}

double aperture_from_grd(double grd, double wavelength, double altitude) {
  if (!positive(grd)) throw ValidationError("grd must be positive");
  if (!positive(wavelength)) throw ValidationError("wavelength must be positive");
  if (!positive(altitude)) throw ValidationError("altitude must be positive");
  return kRayleigh * wavelength * altitude / grd;
}

PupilMask annular_pupil(int grid_n, double outer_radius, double obscuration) {
  if (grid_n < 4 || grid_n % 2 != 0)
    throw ValidationError("pupil grid must be even and at least 4");
  if (!(outer_radius > 0.0 && outer_radius < grid_n / 2.0))
    throw ValidationError("pupil radius must fit inside the grid");
  if (!(obscuration >= 0.0 && obscuration < 1.0))
    throw ValidationError("obscuration must lie in [0, 1)");

  PupilMask pupil{grid_n, outer_radius, obscuration,
                  std::vector<double>(static_cast<std::size_t>(grid_n) * grid_n)};
  const double inner = obscuration * outer_radius;
  const int c = grid_n / 2;
  for (int y = 0; y < grid_n; ++y) {
    for (int x = 0; x < grid_n; ++x) {
      const double r = std::hypot(x - c, y - c);
      const bool outside_hole = obscuration > 0.0 ? r > inner : true;
      pupil.values[y * grid_n + x] = (outside_hole && r <= outer_radius) ? 1.0 : 0.0;
    }
  }
  return pupil;
}

PupilMask pupil_mask(int grid_n, double obscuration) {
  if (grid_n < 64 || grid_n % 2 != 0)
    throw ValidationError("pupil grid must be even and at least 64, got " +
                          std::to_string(grid_n));
  // Half a sample short of n/4 keeps the autocorrelation support strictly
  // inside |shift| < n/2, so the circular result has no wrapped samples.
  return annular_pupil(grid_n, grid_n / 4.0 - 0.5, obscuration);
}

Mtf mtf_from_pupil(const PupilMask& pupil) {
  const int n = pupil.grid_n;
  detail::ComplexFft2d fft(n, n);
  auto buf = fft.data();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = pupil.values[i];
  fft.forward();
  for (auto& v : buf) v = std::norm(v);
  fft.backward();

  Mtf mtf;
  mtf.grid_n = n;
  mtf.values.resize(buf.size());
  const double peak = buf[0].real();
  if (!(peak > 0.0)) throw PipelineError("pupil has no transmitting samples");
  for (std::size_t i = 0; i < buf.size(); ++i)
    mtf.values[i] = std::max(0.0, buf[i].real() / peak);
  swap_quadrants(std::span<double>(mtf.values), n);
  mtf.values[(n / 2) * n + n / 2] = 1.0;
  mtf.cutoff_bins = 2.0 * pupil.outer_radius;
  return mtf;
}

Psf psf_from_mtf(const Mtf& mtf, double pixel_scale) {
  const int n = mtf.grid_n;
  if (n < 2 || n % 2 != 0 ||
      mtf.values.size() != static_cast<std::size_t>(n) * n)
    throw ValidationError("mtf grid must be square with even side");
  if (!positive(pixel_scale)) throw ValidationError("pixel scale must be positive");

  detail::ComplexFft2d fft(n, n);
  auto buf = fft.data();
  std::vector<double> shifted = mtf.values;
  swap_quadrants(std::span<double>(shifted), n);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = shifted[i];
  fft.backward();

  std::vector<double> full(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) full[i] = buf[i].real();
  swap_quadrants(std::span<double>(full), n);

  double peak = 0.0, total = 0.0, negative = 0.0;
  for (double v : full) {
    peak = std::max(peak, v);
    total += std::abs(v);
    if (v < 0.0) negative -= v;
  }
  if (!(peak > 0.0)) throw PipelineError("psf has no positive energy");
  if (negative > 1e-6 * total)
    throw PipelineError("psf has significant negative energy; mtf is not a "
                        "valid autocorrelation");
  for (double& v : full) v = std::max(v, 0.0);

  // Energy per Chebyshev ring about the centre; ring n/2 only exists on one
  // side and is always dropped to keep the kernel centrosymmetric.
  const int c = n / 2;
  std::vector<double> ring(c + 1, 0.0);
  double energy = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int k = std::max(std::abs(x - c), std::abs(y - c));
      ring[k] += full[y * n + x];
      energy += full[y * n + x];
    }
  }
  int radius = c - 1;
  double inside = 0.0;
  for (int k = 0; k < c; ++k) {
    inside += ring[k];
    if (inside >= 0.9999 * energy) {
      radius = k;
      break;
    }
  }

  Psf psf;
  psf.support = 2 * radius + 1;
  psf.pixel_scale = pixel_scale;
  psf.kernel.resize(static_cast<std::size_t>(psf.support) * psf.support);
  for (int y = -radius; y <= radius; ++y) {
    for (int x = -radius; x <= radius; ++x) {
      // Average with the point reflection so the kernel is exactly
      // centrosymmetric; the two values differ only by rounding.
      const double a = full[(c + y) * n + (c + x)];
      const double b = full[(c - y) * n + (c - x)];
      psf.kernel[(y + radius) * psf.support + (x + radius)] = 0.5 * (a + b);
    }
  }
  double sum = 0.0;
  for (double v : psf.kernel) sum += v;
  for (double& v : psf.kernel) v /= sum;
  return psf;
}

Psf psf_for_grd(double grd, const OpticsSpec& spec, double target_gsd,
                int grid_n) {
  if (!positive(grd)) throw ValidationError("grd must be positive");
  if (!positive(target_gsd)) throw ValidationError("target gsd must be positive");
  if (grid_n < 16 || grid_n % 2 != 0)
    throw ValidationError("psf grid must be even and at least 16");
  OpticsSpec optics = spec;
  optics.aperture_diameter =
      aperture_from_grd(grd, spec.wavelength, spec.altitude);
  optics.validate();
  if (grd < 2.0 * target_gsd * (1.0 - 1e-9))
    throw ValidationError("optics unresolvable on this grid: grd " +
                          std::to_string(grd) + " m is finer than 2 x gsd " +
                          std::to_string(target_gsd) + " m");

  // Frequency grid spans +-Nyquist of the target image. The pupil radius is
  // chosen so the autocorrelation cutoff lands on D / (lambda H).
  const double cutoff = optics.aperture_diameter /
                        (optics.wavelength * optics.altitude);
  const double bin = 1.0 / (grid_n * target_gsd);
  const double cutoff_bins = cutoff / bin;
  PupilMask pupil = annular_pupil(grid_n, 0.5 * cutoff_bins, optics.obscuration);
  Mtf mtf = mtf_from_pupil(pupil);
  mtf.bin_frequency = bin;
  return psf_from_mtf(mtf, target_gsd);
}

double second_moment_radius(const Psf& psf) {
  const int r = psf.radius();
  double sum = 0.0, moment = 0.0;
  for (int y = 0; y < psf.support; ++y) {
    for (int x = 0; x < psf.support; ++x) {
      const double w = psf.at(x, y);
      sum += w;
      moment += w * ((x - r) * (x - r) + (y - r) * (y - r));
    }
  }
  return std::sqrt(moment / sum);
}

double out_of_band_fraction(const Mtf& mtf) {
  const int n = mtf.grid_n;
  const int c = n / 2;
  double total = 0.0, outside = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double v = mtf.at(x, y);
      total += v;
      if (std::hypot(x - c, y - c) >= mtf.cutoff_bins) outside += v;
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace tradescope
