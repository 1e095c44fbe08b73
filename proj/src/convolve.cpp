#include "tradescope/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fft.hpp"
#include "tradescope/error.hpp"

namespace tradescope {

namespace {

// Largest kernel side still convolved directly; beyond this the FFT route
// is cheaper for typical crop sizes.
constexpr int kDirectMaxSupport = 15;

void check_psf(const Psf& psf) {
  if (psf.support < 1 || psf.support % 2 == 0 ||
      psf.kernel.size() != static_cast<std::size_t>(psf.support) * psf.support)
    throw ValidationError("psf must be square with odd support");
}

void convolve_row(const Raster& image, const Psf& psf, Boundary boundary,
                  int c, int y, Raster& out) {
  const int w = image.width();
  const int h = image.height();
  const int r = psf.radius();
  const std::span<const double> src = image.plane(c);
  for (int x = 0; x < w; ++x) {
    double acc = 0.0;
    for (int ky = 0; ky < psf.support; ++ky) {
      const int sy = fold_index(y + r - ky, h, boundary);
      const double* row = src.data() + static_cast<std::size_t>(sy) * w;
      const double* krow = psf.kernel.data() + ky * psf.support;
      for (int kx = 0; kx < psf.support; ++kx)
        acc += krow[kx] * row[fold_index(x + r - kx, w, boundary)];
    }
    out.at(x, y, c) = acc;
  }
}

}  // namespace

Raster convolve_direct_serial(const Raster& image, const Psf& psf,
                              Boundary boundary) {
  check_psf(psf);
  Raster out(image.width(), image.height(), image.channels(), image.gsd());
  for (int c = 0; c < image.channels(); ++c)
    for (int y = 0; y < image.height(); ++y)
      convolve_row(image, psf, boundary, c, y, out);
  return out;
}

Raster convolve_direct(const Raster& image, const Psf& psf,
                       Boundary boundary) {
  check_psf(psf);
  Raster out(image.width(), image.height(), image.channels(), image.gsd());
  const int rows = image.channels() * image.height();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i)
    convolve_row(image, psf, boundary, i / image.height(), i % image.height(),
                 out);
  return out;
}

Raster convolve_fft(const Raster& image, const Psf& psf, Boundary boundary) {
  check_psf(psf);
  const int w = image.width();
  const int h = image.height();
  const int r = psf.radius();
  const int cols = detail::good_fft_size(w + 2 * r);
  const int rows = detail::good_fft_size(h + 2 * r);

  detail::RealFft2d kernel_fft(rows, cols);
  {
    auto k = kernel_fft.real();
    std::fill(k.begin(), k.end(), 0.0);
    for (int ky = 0; ky < psf.support; ++ky) {
      for (int kx = 0; kx < psf.support; ++kx) {
        const int y = (ky - r + rows) % rows;
        const int x = (kx - r + cols) % cols;
        k[static_cast<std::size_t>(y) * cols + x] = psf.at(kx, ky);
      }
    }
    kernel_fft.forward();
  }
  const std::vector<std::complex<double>> kernel_spectrum(
      kernel_fft.spectrum().begin(), kernel_fft.spectrum().end());

  Raster out(w, h, image.channels(), image.gsd());
  detail::RealFft2d fft(rows, cols);
  const double scale = 1.0 / (static_cast<double>(rows) * cols);
  for (int c = 0; c < image.channels(); ++c) {
    auto buf = fft.real();
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::span<const double> src = image.plane(c);
    for (int y = 0; y < h + 2 * r; ++y) {
      const int sy = fold_index(y - r, h, boundary);
      for (int x = 0; x < w + 2 * r; ++x)
        buf[static_cast<std::size_t>(y) * cols + x] =
            src[static_cast<std::size_t>(sy) * w + fold_index(x - r, w, boundary)];
    }
    fft.forward();
    auto spectrum = fft.spectrum();
    for (std::size_t i = 0; i < spectrum.size(); ++i)
      spectrum[i] *= kernel_spectrum[i];
    fft.backward();
    buf = fft.real();
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out.at(x, y, c) =
            buf[static_cast<std::size_t>(y + r) * cols + (x + r)] * scale;
  }
  return out;
}

Raster blur(const Raster& image, const Psf& psf, Boundary boundary) {
  if (std::abs(psf.pixel_scale - image.gsd()) > 1e-9 * image.gsd())
    throw ValidationError("psf pixel scale " + std::to_string(psf.pixel_scale) +
                          " m does not match image gsd " +
                          std::to_string(image.gsd()) + " m");
  if (psf.support <= kDirectMaxSupport)
    return convolve_direct(image, psf, boundary);
  return convolve_fft(image, psf, boundary);
}

}  // namespace tradescope
