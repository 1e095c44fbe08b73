#include "tradescope/iqa.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tradescope/error.hpp"
#include "tradescope/resample.hpp"

namespace tradescope {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;

void check_pair(const Raster& reference, const Raster& candidate) {
  if (!reference.same_shape(candidate))
    throw ValidationError(
        "metric inputs differ in shape: " + std::to_string(reference.width()) +
        "x" + std::to_string(reference.height()) + "x" +
        std::to_string(reference.channels()) + " vs " +
        std::to_string(candidate.width()) + "x" +
        std::to_string(candidate.height()) + "x" +
        std::to_string(candidate.channels()));
}

struct Moments {
  double mean_a = 0, mean_b = 0, var_a = 0, var_b = 0, cov = 0;
};

// Sums are accumulated per row and combined serially so the result does not
// depend on how rows were distributed across threads.
Moments plane_moments(std::span<const double> a, std::span<const double> b,
                      int width, int height) {
  const double n = static_cast<double>(a.size());
  std::vector<double> sa(height), sb(height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    double ra = 0.0, rb = 0.0;
    for (int x = 0; x < width; ++x) {
      ra += a[static_cast<std::size_t>(y) * width + x];
      rb += b[static_cast<std::size_t>(y) * width + x];
    }
    sa[y] = ra;
    sb[y] = rb;
  }
  Moments m;
  for (int y = 0; y < height; ++y) {
    m.mean_a += sa[y];
    m.mean_b += sb[y];
  }
  m.mean_a /= n;
  m.mean_b /= n;

  std::vector<double> vaa(height), vbb(height), vab(height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    double raa = 0.0, rbb = 0.0, rab = 0.0;
    for (int x = 0; x < width; ++x) {
      const double da = a[static_cast<std::size_t>(y) * width + x] - m.mean_a;
      const double db = b[static_cast<std::size_t>(y) * width + x] - m.mean_b;
      raa += da * da;
      rbb += db * db;
      rab += da * db;
    }
    vaa[y] = raa;
    vbb[y] = rbb;
    vab[y] = rab;
  }
  for (int y = 0; y < height; ++y) {
    m.var_a += vaa[y];
    m.var_b += vbb[y];
    m.cov += vab[y];
  }
  m.var_a /= n;
  m.var_b /= n;
  m.cov /= n;
  return m;
}

double ssim_formula(double mean_a, double mean_b, double var_a, double var_b,
                    double cov, double c1, double c2) {
  return ((2.0 * mean_a * mean_b + c1) * (2.0 * cov + c2)) /
         ((mean_a * mean_a + mean_b * mean_b + c1) * (var_a + var_b + c2));
}

std::vector<double> gaussian_taps() {
  std::vector<double> g(kWindow);
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    g[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable valid-mode Gaussian filter of a * b (or a when b is empty).
std::vector<double> window_filter(std::span<const double> a,
                                  std::span<const double> b, int width,
                                  int height, const std::vector<double>& g) {
  const int ow = width - kWindow + 1;
  const int oh = height - kWindow + 1;
  std::vector<double> horizontal(static_cast<std::size_t>(ow) * height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) {
        const std::size_t i = static_cast<std::size_t>(y) * width + x + k;
        acc += g[k] * (b.empty() ? a[i] : a[i] * b[i]);
      }
      horizontal[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k)
        acc += g[k] * horizontal[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

Raster align_for_metric(const Raster& candidate, const Raster& reference) {
  if (candidate.channels() != reference.channels())
    throw ValidationError("candidate and reference channel counts differ");
  const double ref_w = reference.width() * reference.gsd();
  const double ref_h = reference.height() * reference.gsd();
  const double cand_w = candidate.width() * candidate.gsd();
  const double cand_h = candidate.height() * candidate.gsd();
  const double tolerance = reference.gsd() * (1.0 + 1e-9);
  if (std::abs(ref_w - cand_w) > tolerance || std::abs(ref_h - cand_h) > tolerance)
    throw ValidationError("candidate extent " + std::to_string(cand_w) + "x" +
                          std::to_string(cand_h) +
                          " m does not match reference extent " +
                          std::to_string(ref_w) + "x" + std::to_string(ref_h) +
                          " m");
  if (candidate.width() == reference.width() &&
      candidate.height() == reference.height())
    return candidate;
  Raster aligned = resize(candidate, reference.width(), reference.height(),
                          ResampleKernel::Bicubic);
  aligned.set_gsd(reference.gsd());
  return clamp_unit(std::move(aligned));
}

double mse(const Raster& reference, const Raster& candidate) {
  check_pair(reference, candidate);
  const int rows = reference.channels() * reference.height();
  const int w = reference.width();
  std::vector<double> partial(rows);
  const auto a = reference.data();
  const auto b = candidate.data();
#pragma omp parallel for schedule(static)
  for (int row = 0; row < rows; ++row) {
    double acc = 0.0;
    for (int x = 0; x < w; ++x) {
      const double d = a[static_cast<std::size_t>(row) * w + x] -
                       b[static_cast<std::size_t>(row) * w + x];
      acc += d * d;
    }
    partial[row] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(reference.size());
}

double psnr_from_mse(double mse_value, double peak) {
  if (!(peak > 0.0)) throw ValidationError("psnr peak must be positive");
  if (mse_value == 0.0) return kInfinitePsnr;
  return 10.0 * std::log10(peak * peak / mse_value);
}

double psnr(const Raster& reference, const Raster& candidate, double peak) {
  return psnr_from_mse(mse(reference, candidate), peak);
}

double ssim_global(const Raster& reference, const Raster& candidate,
                   double peak) {
  check_pair(reference, candidate);
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  double total = 0.0;
  for (int c = 0; c < reference.channels(); ++c) {
    const Moments m = plane_moments(reference.plane(c), candidate.plane(c),
                                    reference.width(), reference.height());
    total += ssim_formula(m.mean_a, m.mean_b, m.var_a, m.var_b, m.cov, c1, c2);
  }
  return total / reference.channels();
}

double ssim_windowed(const Raster& reference, const Raster& candidate,
                     double peak) {
  check_pair(reference, candidate);
  const int w = reference.width();
  const int h = reference.height();
  if (w < kWindow || h < kWindow)
    throw ValidationError("windowed ssim needs at least 11x11 pixels");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const std::vector<double> g = gaussian_taps();
  const std::span<const double> none;

  double total = 0.0;
  for (int c = 0; c < reference.channels(); ++c) {
    const auto a = reference.plane(c);
    const auto b = candidate.plane(c);
    const auto mu_a = window_filter(a, none, w, h, g);
    const auto mu_b = window_filter(b, none, w, h, g);
    const auto aa = window_filter(a, a, w, h, g);
    const auto bb = window_filter(b, b, w, h, g);
    const auto ab = window_filter(a, b, w, h, g);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double ma = mu_a[i];
      const double mb = mu_b[i];
      sum += ssim_formula(ma, mb, aa[i] - ma * ma, bb[i] - mb * mb,
                          ab[i] - ma * mb, c1, c2);
    }
    total += sum / static_cast<double>(mu_a.size());
  }
  return total / reference.channels();
}

MetricRecord evaluate(const Raster& reference, const Raster& candidate,
                      std::string reference_id, std::string candidate_id) {
  MetricRecord record;
  record.mse = mse(reference, candidate);
  record.psnr = psnr_from_mse(record.mse);
  record.ssim_global = ssim_global(reference, candidate);
  record.ssim_windowed =
      reference.width() >= kWindow && reference.height() >= kWindow
          ? ssim_windowed(reference, candidate)
          : std::numeric_limits<double>::quiet_NaN();
  record.reference_id = std::move(reference_id);
  record.candidate_id = std::move(candidate_id);
  return record;
}

}  // namespace tradescope
