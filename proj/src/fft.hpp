#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tradescope::detail {

/// In-place 2D complex transform, unnormalized in both directions.
class ComplexFft2d {
 public:
  ComplexFft2d(int rows, int cols);
  ~ComplexFft2d();
  ComplexFft2d(const ComplexFft2d&) = delete;
  ComplexFft2d& operator=(const ComplexFft2d&) = delete;

  std::span<std::complex<double>> data() noexcept;
  void forward();
  void backward();

 private:
  int rows_;
  int cols_;
  void* buffer_;
  void* forward_plan_;
  void* backward_plan_;
};

/// 2D real-to-half-complex pair. backward() overwrites the spectrum and
/// leaves the unnormalized result in real().
class RealFft2d {
 public:
  RealFft2d(int rows, int cols);
  ~RealFft2d();
  RealFft2d(const RealFft2d&) = delete;
  RealFft2d& operator=(const RealFft2d&) = delete;

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int spectrum_cols() const noexcept { return cols_ / 2 + 1; }

  std::span<double> real() noexcept;
  std::span<std::complex<double>> spectrum() noexcept;
  void forward();
  void backward();

 private:
  int rows_;
  int cols_;
  void* real_;
  void* spectrum_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
int good_fft_size(int n);

}  // namespace tradescope::detail
