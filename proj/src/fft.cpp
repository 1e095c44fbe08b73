#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>

namespace tradescope::detail {

namespace {

// FFTW's planner is not reentrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

}  // namespace

ComplexFft2d::ComplexFft2d(int rows, int cols) : rows_(rows), cols_(cols) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  buffer_ = fftw_malloc(sizeof(fftw_complex) * n);
  if (!buffer_) throw std::bad_alloc();
  auto* buf = static_cast<fftw_complex*>(buffer_);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD,
                                   FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
}

ComplexFft2d::~ComplexFft2d() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  }
  fftw_free(buffer_);
}

std::span<std::complex<double>> ComplexFft2d::data() noexcept {
  return {reinterpret_cast<std::complex<double>*>(buffer_),
          static_cast<std::size_t>(rows_) * cols_};
}

void ComplexFft2d::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void ComplexFft2d::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

RealFft2d::RealFft2d(int rows, int cols) : rows_(rows), cols_(cols) {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  const std::size_t m = static_cast<std::size_t>(rows) * (cols / 2 + 1);
  real_ = fftw_malloc(sizeof(double) * n);
  spectrum_ = fftw_malloc(sizeof(fftw_complex) * m);
  if (!real_ || !spectrum_) {
    fftw_free(real_);
    fftw_free(spectrum_);
    throw std::bad_alloc();
  }
  auto* r = static_cast<double*>(real_);
  auto* s = static_cast<fftw_complex*>(spectrum_);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_2d(rows, cols, r, s, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_c2r_2d(rows, cols, s, r, FFTW_ESTIMATE);
}

RealFft2d::~RealFft2d() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

std::span<double> RealFft2d::real() noexcept {
  return {static_cast<double*>(real_), static_cast<std::size_t>(rows_) * cols_};
}

std::span<std::complex<double>> RealFft2d::spectrum() noexcept {
  return {reinterpret_cast<std::complex<double>*>(spectrum_),
          static_cast<std::size_t>(rows_) * (cols_ / 2 + 1)};
}

void RealFft2d::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void RealFft2d::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

int good_fft_size(int n) {
  for (int m = n < 1 ? 1 : n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace tradescope::detail
