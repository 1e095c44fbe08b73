#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tradescope/raster.hpp"

namespace tradescope {

enum class Geography { Beach, Forest, Rural, RuralUrban, Urban };

inline constexpr Geography kAllGeographies[] = {
    Geography::Beach, Geography::Forest, Geography::Rural,
    Geography::RuralUrban, Geography::Urban};

std::string_view to_string(Geography geography) noexcept;
std::optional<Geography> parse_geography(std::string_view text) noexcept;

struct LabeledCrop {
  Geography geography = Geography::Beach;
  int crop_id = 1;
  Raster raster;
};

struct ManifestEntry {
  std::filesystem::path path;  // relative to the manifest root
  Geography geography = Geography::Beach;
  int crop_id = 1;
  double gsd_m = 1.0;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;

  /// Unique paths, crop_id >= 1, gsd > 0; optionally that every file exists.
  void validate(bool check_files) const;
};

/// Manifest file: {"entries": [{"path", "geography", "crop_id", "gsd_m"}]}.
/// The root is the directory holding the manifest.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

std::vector<LabeledCrop> load_crops(const DatasetManifest& manifest);

}  // namespace tradescope
