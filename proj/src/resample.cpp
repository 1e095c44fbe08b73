#include "tradescope/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tradescope/error.hpp"

namespace tradescope {

namespace {

struct Tap {
  int index;
  double weight;
};

// Per output sample, the contributing input samples along one axis.
using TapTable = std::vector<std::vector<Tap>>;

double cubic(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double lanczos3(double x) {
  return std::abs(x) < 3.0 ? sinc(x) * sinc(x / 3.0) : 0.0;
}

TapTable area_taps(int in, int out) {
  const double s = static_cast<double>(in) / out;
  TapTable table(out);
  for (int j = 0; j < out; ++j) {
    const double lo = j * s;
    const double hi = (j + 1) * s;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(in - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int i = first; i <= last; ++i) {
      const double overlap = std::min(hi, i + 1.0) - std::max(lo, double(i));
      if (overlap > 0.0) table[j].push_back({i, overlap / s});
    }
  }
  return table;
}

TapTable kernel_taps(int in, int out, ResampleKernel kernel) {
  const double s = static_cast<double>(in) / out;
  TapTable table(out);
  for (int j = 0; j < out; ++j) {
    const double center = (j + 0.5) * s - 0.5;
    if (kernel == ResampleKernel::Nearest) {
      const int i = std::clamp(static_cast<int>(std::floor((j + 0.5) * s)), 0,
                               in - 1);
      table[j].push_back({i, 1.0});
      continue;
    }
    const int support = kernel == ResampleKernel::Bilinear  ? 1
                        : kernel == ResampleKernel::Bicubic ? 2
                                                            : 3;
    const int base = static_cast<int>(std::floor(center));
    double total = 0.0;
    for (int i = base - support + 1; i <= base + support; ++i) {
      const double d = center - i;
      double w = 0.0;
      switch (kernel) {
        case ResampleKernel::Bilinear: w = std::max(0.0, 1.0 - std::abs(d)); break;
        case ResampleKernel::Bicubic: w = cubic(d); break;
        default: w = lanczos3(d); break;
      }
      if (w == 0.0) continue;
      const int clamped = std::clamp(i, 0, in - 1);
      auto& taps = table[j];
      if (!taps.empty() && taps.back().index == clamped)
        taps.back().weight += w;
      else
        taps.push_back({clamped, w});
      total += w;
    }
    for (Tap& t : table[j]) t.weight /= total;
  }
  return table;
}

TapTable taps_for(int in, int out, ResampleKernel kernel) {
  if (in == out) {
    TapTable identity(out);
    for (int j = 0; j < out; ++j) identity[j].push_back({j, 1.0});
    return identity;
  }
  return kernel == ResampleKernel::Area ? area_taps(in, out)
                                        : kernel_taps(in, out, kernel);
}

Raster resize_impl(const Raster& image, int width, int height,
                   ResampleKernel kernel, bool parallel) {
  if (width < 1 || height < 1)
    throw ValidationError("resample target must be at least 1x1 pixel");
  const int w = image.width();
  const int h = image.height();
  const int channels = image.channels();
  const TapTable xt = taps_for(w, width, kernel);
  const TapTable yt = taps_for(h, height, kernel);
  const double gsd = image.gsd() * static_cast<double>(w) / width;

  // Horizontal pass into (width x h), then vertical into (width x height).
  Raster tmp(width, h, channels, gsd);
  const int tmp_rows = channels * h;
#pragma omp parallel for schedule(static) if (parallel)
  for (int row = 0; row < tmp_rows; ++row) {
    const int c = row / h;
    const int y = row % h;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (const Tap& t : xt[x]) acc += t.weight * image.at(t.index, y, c);
      tmp.at(x, y, c) = acc;
    }
  }
  Raster out(width, height, channels, gsd);
  const int out_rows = channels * height;
#pragma omp parallel for schedule(static) if (parallel)
  for (int row = 0; row < out_rows; ++row) {
    const int c = row / height;
    const int y = row % height;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (const Tap& t : yt[y]) acc += t.weight * tmp.at(x, t.index, c);
      out.at(x, y, c) = acc;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(ResampleKernel kernel) noexcept {
  switch (kernel) {
    case ResampleKernel::Area: return "area";
    case ResampleKernel::Nearest: return "nearest";
    case ResampleKernel::Bilinear: return "bilinear";
    case ResampleKernel::Bicubic: return "bicubic";
    case ResampleKernel::Lanczos3: return "lanczos3";
  }
  return "area";
}

std::optional<ResampleKernel> parse_resample_kernel(
    std::string_view text) noexcept {
  for (ResampleKernel k :
       {ResampleKernel::Area, ResampleKernel::Nearest, ResampleKernel::Bilinear,
        ResampleKernel::Bicubic, ResampleKernel::Lanczos3})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

Raster resize(const Raster& image, int width, int height,
              ResampleKernel kernel) {
  return resize_impl(image, width, height, kernel, true);
}

Raster resize_serial(const Raster& image, int width, int height,
                     ResampleKernel kernel) {
  return resize_impl(image, width, height, kernel, false);
}

Raster resample(const Raster& image, double target_gsd, ResampleKernel kernel) {
  if (!(target_gsd > 0.0) || !std::isfinite(target_gsd))
    throw ValidationError("target gsd must be positive");
  const double ratio = image.gsd() / target_gsd;
  const long width = std::lround(image.width() * ratio);
  const long height = std::lround(image.height() * ratio);
  if (width < 1 || height < 1)
    throw ValidationError("resampling to " + std::to_string(target_gsd) +
                          " m/px leaves less than one pixel");
  if (width == image.width() && height == image.height()) {
    Raster same = image;
    same.set_gsd(target_gsd);
    return same;
  }
  Raster out = resize(image, static_cast<int>(width), static_cast<int>(height),
                      kernel);
  out.set_gsd(target_gsd);
  return out;
}

ResampleKernel pick_kernel(int from, int to, ResampleKernel down,
                           ResampleKernel up) noexcept {
  return to < from ? down : up;
}

}  // namespace tradescope
