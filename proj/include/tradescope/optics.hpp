#pragma once

#include <vector>

namespace tradescope {

/// Telescope geometry for a monochromatic, diffraction-limited system.
struct OpticsSpec {
  double wavelength = 560e-9;     // m
  double altitude = 500e3;        // m
  double aperture_diameter = 0.28;  // m
  double obscuration = 0.4;       // inner / outer diameter

  void validate() const;
};

/// Rayleigh ground resolved distance 1.22 * lambda * H / D, in metres.
double grd_from_aperture(const OpticsSpec& spec);

/// Aperture diameter that yields `grd` at the given wavelength and altitude.
double aperture_from_grd(double grd, double wavelength, double altitude);

/// Binary annular transmittance on a square grid, centred on (n/2, n/2).
struct PupilMask {
  int grid_n = 0;
  double outer_radius = 0.0;  // grid units
  double obscuration = 0.0;
  std::vector<double> values;  // row-major, 0 or 1

  double at(int x, int y) const { return values[y * grid_n + x]; }
};

/// Default pupil: the aperture diameter spans about half the grid, leaving
/// room for the autocorrelation support without wraparound.
PupilMask pupil_mask(int grid_n, double obscuration);

/// Annulus obscuration*R < r <= R for an arbitrary outer radius.
PupilMask annular_pupil(int grid_n, double outer_radius, double obscuration);

/// Peak-normalized modulation transfer function, zero frequency at (n/2, n/2).
struct Mtf {
  int grid_n = 0;
  std::vector<double> values;
  double cutoff_bins = 0.0;     // radial cutoff in frequency bins
  double bin_frequency = 1.0;   // cycles per metre per bin (1 when unscaled)

  double at(int x, int y) const { return values[y * grid_n + x]; }
  double cutoff_frequency() const { return cutoff_bins * bin_frequency; }
};

/// Normalized pupil autocorrelation, computed as IFFT(|FFT(pupil)|^2).
Mtf mtf_from_pupil(const PupilMask& pupil);

/// Blur kernel with unit sum, centred at (radius, radius).
struct Psf {
  int support = 1;  // side length, always odd
  std::vector<double> kernel;
  double pixel_scale = 1.0;  // metres per kernel pixel

  int radius() const { return support / 2; }
  double at(int x, int y) const { return kernel[y * support + x]; }
};

/// Inverse transform of the MTF: clipped, cropped to the window holding
/// 99.99% of the energy, and renormalized.
Psf psf_from_mtf(const Mtf& mtf, double pixel_scale = 1.0);

/// Diffraction PSF sampled on a grid of `target_gsd` metres per pixel for an
/// aperture sized to resolve `grd`. Throws ValidationError when grd is finer
/// than 2 * target_gsd.
Psf psf_for_grd(double grd, const OpticsSpec& spec, double target_gsd,
                int grid_n = 128);

/// RMS radius of the kernel about its centre, in kernel pixels.
double second_moment_radius(const Psf& psf);

/// Fraction of total MTF mass at radial frequency >= the cutoff.
double out_of_band_fraction(const Mtf& mtf);

}  // namespace tradescope
