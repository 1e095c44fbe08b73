#include "tradescope/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "tradescope/error.hpp"

namespace tradescope {

using json = nlohmann::json;

std::string_view to_string(Geography geography) noexcept {
  switch (geography) {
    case Geography::Beach: return "beach";
    case Geography::Forest: return "forest";
    case Geography::Rural: return "rural";
    case Geography::RuralUrban: return "rural_urban";
    case Geography::Urban: return "urban";
  }
  return "beach";
}

std::optional<Geography> parse_geography(std::string_view text) noexcept {
  for (Geography g : kAllGeographies)
    if (to_string(g) == text) return g;
  return std::nullopt;
}

void DatasetManifest::validate(bool check_files) const {
  std::set<std::filesystem::path> seen;
  for (const ManifestEntry& entry : entries) {
    if (!seen.insert(entry.path.lexically_normal()).second)
      throw ValidationError("manifest: duplicate path " + entry.path.string());
    if (entry.crop_id < 1)
      throw ValidationError("manifest: crop_id must be >= 1 for " +
                            entry.path.string());
    if (!(entry.gsd_m > 0.0))
      throw ValidationError("manifest: gsd_m must be positive for " +
                            entry.path.string());
    if (check_files && !std::filesystem::exists(root / entry.path))
      throw IoError("manifest: missing file " + (root / entry.path).string());
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("manifest " + path.string() + ": " + e.what());
  }

  DatasetManifest manifest;
  manifest.root = path.parent_path();
  try {
    for (const json& item : doc.at("entries")) {
      ManifestEntry entry;
      entry.path = item.at("path").get<std::string>();
      const auto label = item.at("geography").get<std::string>();
      const auto geography = parse_geography(label);
      if (!geography)
        throw ValidationError("manifest: unknown geography '" + label + "'");
      entry.geography = *geography;
      entry.crop_id = item.at("crop_id").get<int>();
      entry.gsd_m = item.at("gsd_m").get<double>();
      manifest.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ValidationError("manifest " + path.string() + ": " + e.what());
  }
  manifest.validate(true);
  return manifest;
}

void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path) {
  json entries = json::array();
  for (const ManifestEntry& entry : manifest.entries) {
    entries.push_back({{"path", entry.path.generic_string()},
                       {"geography", std::string(to_string(entry.geography))},
                       {"crop_id", entry.crop_id},
                       {"gsd_m", entry.gsd_m}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << json{{"entries", entries}}.dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest " + path.string());
}

std::vector<LabeledCrop> load_crops(const DatasetManifest& manifest) {
  std::vector<LabeledCrop> crops;
  crops.reserve(manifest.entries.size());
  for (const ManifestEntry& entry : manifest.entries) {
    crops.push_back({entry.geography, entry.crop_id,
                     load_raster(manifest.root / entry.path, entry.gsd_m)});
  }
  return crops;
}

}  // namespace tradescope
