#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tradescope/manifest.hpp"

namespace tradescope {

/// Procedural RGB crop whose texture statistics stand in for a geography:
/// smooth gradients for beach, band-limited noise for forest, field patches
/// for rural, mixed blocks for rural_urban and dense street grids for urban.
Raster synthetic_crop(Geography geography, int crop_id, int size, double gsd,
                      std::uint64_t seed);

struct CorpusOptions {
  int size = 240;
  double gsd = 0.6;
  int crops_per_geography = 1;
  std::uint64_t seed = 2021;
};

std::vector<LabeledCrop> synthetic_corpus(const CorpusOptions& options);

/// Writes 16-bit PNGs plus manifest.json into `dir`; returns the manifest.
DatasetManifest write_synthetic_corpus(const std::filesystem::path& dir,
                                       const CorpusOptions& options);

}  // namespace tradescope
