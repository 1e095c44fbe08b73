#include "tradescope/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tradescope/error.hpp"
#include "tradescope/noise.hpp"

namespace tradescope {

namespace {

using Rgb = std::array<double, 3>;

class Canvas {
 public:
  Canvas(int size, double gsd) : raster_(size, size, 3, gsd), size_(size) {}

  int size() const { return size_; }
  void set(int x, int y, const Rgb& c) {
    for (int k = 0; k < 3; ++k) raster_.at(x, y, k) = c[k];
  }
  Rgb get(int x, int y) const {
    return {raster_.at(x, y, 0), raster_.at(x, y, 1), raster_.at(x, y, 2)};
  }
  void fill_rect(int x0, int y0, int w, int h, const Rgb& c) {
    for (int y = std::max(0, y0); y < std::min(size_, y0 + h); ++y)
      for (int x = std::max(0, x0); x < std::min(size_, x0 + w); ++x) set(x, y, c);
  }
  Raster finish() && {
    for (double& v : raster_.data()) v = std::clamp(v, 0.02, 0.98);
    return std::move(raster_);
  }

 private:
  Raster raster_;
  int size_;
};

// Smooth value noise in [-1, 1] with features about `cell` pixels across.
class ValueNoise {
 public:
  ValueNoise(int size, double cell, std::mt19937_64& rng)
      : cell_(cell), n_(static_cast<int>(size / cell) + 3) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    grid_.resize(static_cast<std::size_t>(n_) * n_);
    for (double& v : grid_) v = u(rng);
  }

  double operator()(double x, double y) const {
    const double gx = x / cell_;
    const double gy = y / cell_;
    const int ix = static_cast<int>(gx);
    const int iy = static_cast<int>(gy);
    const double fx = smooth(gx - ix);
    const double fy = smooth(gy - iy);
    const double a = at(ix, iy), b = at(ix + 1, iy);
    const double c = at(ix, iy + 1), d = at(ix + 1, iy + 1);
    return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  double at(int x, int y) const {
    return grid_[static_cast<std::size_t>(std::min(y, n_ - 1)) * n_ +
                 std::min(x, n_ - 1)];
  }

  double cell_;
  int n_;
  std::vector<double> grid_;
};

Rgb mix(const Rgb& a, const Rgb& b, double t) {
  return {a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t,
          a[2] + (b[2] - a[2]) * t};
}

Rgb scaled(const Rgb& c, double s) { return {c[0] * s, c[1] * s, c[2] * s}; }

Raster beach(int size, double gsd, std::mt19937_64& rng) {
  Canvas canvas(size, gsd);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double angle = u(rng) * std::numbers::pi;
  const double wave = 6.0 + 6.0 * u(rng);
  const ValueNoise coarse(size, 40.0, rng);
  const ValueNoise ripples(size, 3.0, rng);
  const Rgb sand{0.85, 0.78, 0.60}, water{0.15, 0.35, 0.55}, foam{0.95, 0.95, 0.95};
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double t = (x * std::cos(angle) + y * std::sin(angle)) / size;
      const double shore = 0.5 + 0.1 * coarse(x, y);
      const double d = t - shore;
      Rgb c = d < 0 ? mix(sand, scaled(sand, 0.9), -d) : mix(water, scaled(water, 0.7), d);
      const double surf = std::exp(-std::pow(d * size / wave, 2.0));
      c = mix(c, foam, 0.6 * surf * (0.5 + 0.5 * std::sin(y * 0.7)));
      canvas.set(x, y, scaled(c, 1.0 + 0.08 * ripples(x, y)));
    }
  }
  return std::move(canvas).finish();
}

Raster forest(int size, double gsd, std::mt19937_64& rng) {
  Canvas canvas(size, gsd);
  const ValueNoise canopy(size, 5.0, rng);
  const ValueNoise crowns(size, 2.0, rng);
  const ValueNoise stands(size, 30.0, rng);
  const Rgb dark{0.08, 0.22, 0.08}, light{0.30, 0.50, 0.22};
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double t = 0.5 + 0.3 * canopy(x, y) + 0.15 * crowns(x, y) +
                       0.1 * stands(x, y);
      canvas.set(x, y, mix(dark, light, std::clamp(t, 0.0, 1.0)));
    }
  }
  return std::move(canvas).finish();
}

void fields(Canvas& canvas, std::mt19937_64& rng, int min_field, int max_field) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> span(min_field, max_field);
  const std::array<Rgb, 5> crops{Rgb{0.55, 0.50, 0.25}, Rgb{0.35, 0.55, 0.20},
                                 Rgb{0.60, 0.45, 0.30}, Rgb{0.25, 0.40, 0.15},
                                 Rgb{0.70, 0.65, 0.40}};
  for (int y0 = 0; y0 < canvas.size();) {
    const int h = span(rng);
    for (int x0 = 0; x0 < canvas.size();) {
      const int w = span(rng);
      const Rgb base = crops[static_cast<std::size_t>(u(rng) * crops.size()) % crops.size()];
      const double period = 3.0 + 4.0 * u(rng);
      const bool vertical = u(rng) < 0.5;
      for (int y = y0; y < std::min(canvas.size(), y0 + h); ++y) {
        for (int x = x0; x < std::min(canvas.size(), x0 + w); ++x) {
          const double p = vertical ? x : y;
          const double row = 0.9 + 0.1 * std::sin(2.0 * std::numbers::pi * p / period);
          canvas.set(x, y, scaled(base, row));
        }
      }
      x0 += w;
    }
    y0 += h;
  }
}

void road(Canvas& canvas, int pos, int width, bool vertical, const Rgb& c) {
  if (vertical) canvas.fill_rect(pos, 0, width, canvas.size(), c);
  else canvas.fill_rect(0, pos, canvas.size(), width, c);
}

void buildings(Canvas& canvas, std::mt19937_64& rng, int x0, int y0, int w,
               int h, int min_side, int max_side) {
  std::uniform_int_distribution<int> side(min_side, max_side);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int y = y0 + 1; y < y0 + h - min_side;) {
    const int bh = std::min(side(rng), y0 + h - 1 - y);
    for (int x = x0 + 1; x < x0 + w - min_side;) {
      const int bw = std::min(side(rng), x0 + w - 1 - x);
      const double g = 0.35 + 0.55 * u(rng);
      const Rgb roof{g, g * (0.9 + 0.1 * u(rng)), g * (0.85 + 0.15 * u(rng))};
      canvas.fill_rect(x, y, bw, bh, roof);
      canvas.fill_rect(x + bw - 1, y, 1, bh, scaled(roof, 0.6));  // shadow edge
      x += bw + 1 + static_cast<int>(2 * u(rng));
    }
    y += bh + 1 + static_cast<int>(2 * u(rng));
  }
}

Raster rural(int size, double gsd, std::mt19937_64& rng) {
  Canvas canvas(size, gsd);
  fields(canvas, rng, size / 5, size / 2);
  std::uniform_int_distribution<int> pos(size / 5, 4 * size / 5);
  road(canvas, pos(rng), 3, true, Rgb{0.55, 0.52, 0.48});
  return std::move(canvas).finish();
}

Raster rural_urban(int size, double gsd, std::mt19937_64& rng) {
  Canvas canvas(size, gsd);
  fields(canvas, rng, size / 6, size / 3);
  const int split = size / 2;
  canvas.fill_rect(0, 0, split, size, Rgb{0.45, 0.45, 0.42});
  buildings(canvas, rng, 0, 0, split, size, 6, 16);
  road(canvas, split, 4, true, Rgb{0.25, 0.25, 0.25});
  road(canvas, size / 3, 4, false, Rgb{0.25, 0.25, 0.25});
  return std::move(canvas).finish();
}

Raster urban(int size, double gsd, std::mt19937_64& rng) {
  Canvas canvas(size, gsd);
  canvas.fill_rect(0, 0, size, size, Rgb{0.40, 0.40, 0.40});
  std::uniform_int_distribution<int> block(size / 8, size / 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> xs{0}, ys{0};
  while (xs.back() < size) xs.push_back(xs.back() + block(rng));
  while (ys.back() < size) ys.push_back(ys.back() + block(rng));
  for (std::size_t j = 0; j + 1 < ys.size(); ++j)
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      buildings(canvas, rng, xs[i] + 3, ys[j] + 3, xs[i + 1] - xs[i] - 3,
                ys[j + 1] - ys[j] - 3, 4, 12);
  const Rgb asphalt{0.18, 0.18, 0.19};
  for (int x : xs) road(canvas, x, 3, true, asphalt);
  for (int y : ys) road(canvas, y, 3, false, asphalt);
  // Cars: small bright rectangles along the streets.
  for (int x : xs) {
    for (int y = 0; y < size; y += 5 + static_cast<int>(8 * u(rng))) {
      const double g = u(rng);
      canvas.fill_rect(x + 1, y, 2, 3, Rgb{0.2 + 0.75 * g, 0.2 + 0.6 * g, 0.2 + 0.5 * u(rng)});
    }
  }
  return std::move(canvas).finish();
}

}  // namespace

Raster synthetic_crop(Geography geography, int crop_id, int size, double gsd,
                      std::uint64_t seed) {
  if (size < 16) throw ValidationError("synthetic crop size must be >= 16");
  if (crop_id < 1) throw ValidationError("crop_id must be >= 1");
  std::mt19937_64 rng(mix_seed(
      seed, static_cast<std::uint64_t>(geography) * 1000u + static_cast<unsigned>(crop_id)));
  switch (geography) {
    case Geography::Beach: return beach(size, gsd, rng);
    case Geography::Forest: return forest(size, gsd, rng);
    case Geography::Rural: return rural(size, gsd, rng);
    case Geography::RuralUrban: return rural_urban(size, gsd, rng);
    case Geography::Urban: return urban(size, gsd, rng);
  }
  return beach(size, gsd, rng);
}

std::vector<LabeledCrop> synthetic_corpus(const CorpusOptions& options) {
  if (options.crops_per_geography < 1)
    throw ValidationError("crops_per_geography must be >= 1");
  std::vector<LabeledCrop> crops;
  for (Geography g : kAllGeographies)
    for (int id = 1; id <= options.crops_per_geography; ++id)
      crops.push_back({g, id, synthetic_crop(g, id, options.size, options.gsd,
                                             options.seed)});
  return crops;
}

DatasetManifest write_synthetic_corpus(const std::filesystem::path& dir,
                                       const CorpusOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  DatasetManifest manifest;
  manifest.root = dir;
  for (const LabeledCrop& crop : synthetic_corpus(options)) {
    const std::string name = std::string(to_string(crop.geography)) + "_" +
                             std::to_string(crop.crop_id) + ".png";
    save_raster(crop.raster, dir / name, 16);
    manifest.entries.push_back({name, crop.geography, crop.crop_id, options.gsd});
  }
  save_manifest(manifest, dir / "manifest.json");
  return manifest;
}

}  // namespace tradescope
