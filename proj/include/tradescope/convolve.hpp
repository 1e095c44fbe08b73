#pragma once

#include "tradescope/boundary.hpp"
#include "tradescope/optics.hpp"
#include "tradescope/raster.hpp"

namespace tradescope {

/// Direct per-channel 2D convolution, single threaded. Kept as the reference
/// the parallel kernels are checked against.
Raster convolve_direct_serial(const Raster& image, const Psf& psf,
                              Boundary boundary = Boundary::Reflect);

/// Same arithmetic as convolve_direct_serial, rows split across threads.
Raster convolve_direct(const Raster& image, const Psf& psf,
                       Boundary boundary = Boundary::Reflect);

/// FFT convolution over the boundary-padded image.
Raster convolve_fft(const Raster& image, const Psf& psf,
                    Boundary boundary = Boundary::Reflect);

/// Optical blur. Requires psf.pixel_scale == image.gsd() (relative 1e-9) and
/// picks the direct or FFT route by kernel size.
Raster blur(const Raster& image, const Psf& psf,
            Boundary boundary = Boundary::Reflect);

}  // namespace tradescope
