// Brute-force reference implementations. Deliberately naive: no shared code
// paths with the library beyond the Raster / FeatureMap containers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tradescope/edsr.hpp"
#include "tradescope/optics.hpp"
#include "tradescope/raster.hpp"
#include "tradescope/stats.hpp"

namespace oracle {

using tradescope::Raster;
namespace edsr = tradescope::edsr;

// Half-sample symmetric extension by repeated mirroring.
inline int mirror(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

inline int clamp_edge(int i, int n) { return std::clamp(i, 0, n - 1); }

// Unnormalized overlap sum A(s) = sum_p P(p) P(p + s), O(n^4).
inline std::vector<double> autocorrelation(const tradescope::PupilMask& p) {
  const int n = p.grid_n;
  const int c = n / 2;
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (int sy = -c; sy < c; ++sy)
    for (int sx = -c; sx < c; ++sx) {
      double acc = 0.0;
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          const int qx = x + sx, qy = y + sy;
          if (qx < 0 || qy < 0 || qx >= n || qy >= n) continue;
          acc += p.at(x, y) * p.at(qx, qy);
        }
      out[(sy + c) * n + (sx + c)] = acc;
    }
  return out;
}

// Explicit padded-image convolution: out(x, y) = sum k(u, v) in(x - u, y - v)
// with u, v the kernel offsets from its centre.
inline Raster convolve(const Raster& in, const tradescope::Psf& psf,
                       bool reflect) {
  const int w = in.width(), h = in.height(), r = psf.radius();
  const int pw = w + 2 * r, ph = h + 2 * r;
  Raster out(w, h, in.channels(), in.gsd());
  for (int c = 0; c < in.channels(); ++c) {
    std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x) {
        const int sx = reflect ? mirror(x - r, w) : clamp_edge(x - r, w);
        const int sy = reflect ? mirror(y - r, h) : clamp_edge(y - r, h);
        padded[y * pw + x] = in.at(sx, sy, c);
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int v = -r; v <= r; ++v)
          for (int u = -r; u <= r; ++u)
            acc += psf.at(u + r, v + r) *
                   padded[(y - v + r) * pw + (x - u + r)];
        out.at(x, y, c) = acc;
      }
  }
  return out;
}

inline double mse(const Raster& a, const Raster& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

inline double psnr(const Raster& a, const Raster& b, double peak = 1.0) {
  return 10.0 * std::log10(peak * peak / mse(a, b));
}

// Whole-image SSIM per channel with population moments, channel mean.
inline double ssim_global(const Raster& a, const Raster& b,
                          double peak = 1.0) {
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const double n = static_cast<double>(a.plane_size());
    double ma = 0.0, mb = 0.0;
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) {
        ma += a.at(x, y, c);
        mb += b.at(x, y, c);
      }
    ma /= n;
    mb /= n;
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) {
        const double da = a.at(x, y, c) - ma, db = b.at(x, y, c) - mb;
        va += da * da;
        vb += db * db;
        cov += da * db;
      }
    va /= n;
    vb /= n;
    cov /= n;
    total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / a.channels();
}

// Type-7 quantile on a fully sorted copy.
inline tradescope::BoxStats box_stats(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= v.size()) return v[lo];
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
  };
  tradescope::BoxStats s;
  s.n = static_cast<int>(v.size());
  s.min = v.front();
  s.max = v.back();
  s.q1 = q(0.25);
  s.median = q(0.5);
  s.q3 = q(0.75);
  return s;
}

// Same-size cross-correlation with mirrored borders, quintuple loop.
inline edsr::FeatureMap conv2d(const edsr::FeatureMap& in,
                               const edsr::ConvLayer& layer) {
  const int k = layer.kernel_size, r = k / 2;
  edsr::FeatureMap out(in.width, in.height, layer.out_channels);
  for (int o = 0; o < layer.out_channels; ++o)
    for (int y = 0; y < in.height; ++y)
      for (int x = 0; x < in.width; ++x) {
        double acc = layer.bias[o];
        for (int i = 0; i < layer.in_channels; ++i)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx)
              acc += layer.w(o, i, ky, kx) *
                     in.at(mirror(x + kx - r, in.width),
                           mirror(y + ky - r, in.height), i);
        out.at(x, y, o) = acc;
      }
  return out;
}

inline edsr::FeatureMap shuffle(const edsr::FeatureMap& in, int r) {
  edsr::FeatureMap out(in.width * r, in.height * r, in.channels / (r * r));
  for (int c = 0; c < out.channels; ++c)
    for (int y = 0; y < in.height; ++y)
      for (int x = 0; x < in.width; ++x)
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j)
            out.at(x * r + j, y * r + i, c) = in.at(x, y, c * r * r + i * r + j);
  return out;
}

// Network forward written out from the layer graph; RGB in, RGB out.
inline Raster edsr_forward(const Raster& image, const edsr::ModelConfig& cfg,
                           const edsr::WeightStore& w) {
  edsr::FeatureMap x(image.width(), image.height(), cfg.colors);
  for (int c = 0; c < cfg.colors; ++c)
    for (int y = 0; y < image.height(); ++y)
      for (int xx = 0; xx < image.width(); ++xx)
        x.at(xx, y, c) = image.at(xx, y, image.channels() == 1 ? 0 : c);
  const edsr::FeatureMap head = oracle::conv2d(x, w.head);
  edsr::FeatureMap body = head;
  for (const auto& block : w.blocks) {
    edsr::FeatureMap t = oracle::conv2d(body, block.conv1);
    for (double& v : t.data) v = v > 0.0 ? v : 0.0;
    t = oracle::conv2d(t, block.conv2);
    for (std::size_t i = 0; i < body.data.size(); ++i)
      body.data[i] += cfg.residual_scaling * t.data[i];
  }
  body = oracle::conv2d(body, w.body);
  for (std::size_t i = 0; i < body.data.size(); ++i) body.data[i] += head.data[i];
  int remaining = cfg.scale;
  std::size_t stage = 0;
  while (remaining > 1) {
    const int r = remaining % 2 == 0 ? 2 : 3;
    body = oracle::shuffle(oracle::conv2d(body, w.upsampler[stage++]), r);
    remaining /= r;
  }
  const edsr::FeatureMap out = oracle::conv2d(body, w.tail);
  Raster result(out.width, out.height, image.channels(),
                image.gsd() / cfg.scale);
  for (int y = 0; y < out.height; ++y)
    for (int xx = 0; xx < out.width; ++xx) {
      if (image.channels() == cfg.colors) {
        for (int c = 0; c < cfg.colors; ++c)
          result.at(xx, y, c) = std::clamp(out.at(xx, y, c), 0.0, 1.0);
      } else {
        double m = 0.0;
        for (int c = 0; c < cfg.colors; ++c) m += out.at(xx, y, c);
        result.at(xx, y, 0) = std::clamp(m / cfg.colors, 0.0, 1.0);
      }
    }
  return result;
}

inline Raster random_raster(int w, int h, int c, std::uint64_t seed,
                            double gsd = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Raster r(w, h, c, gsd);
  for (double& v : r.data()) v = u(rng);
  return r;
}

}  // namespace oracle
