#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tradescope {

/// Multi-channel floating-point image tied to a ground sampling distance.
///
/// Samples are stored planar: channel-major, then row-major. Intensities are
/// dimensionless; stages that declare clamping keep them in [0,1].
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, double gsd);
  Raster(int width, int height, int channels, double gsd,
         std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  double gsd() const noexcept { return gsd_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }

  double at(int x, int y, int c = 0) const noexcept {
    return data_[index(x, y, c)];
  }
  double& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> plane(int c) const noexcept {
    return std::span<const double>(data_).subspan(c * plane_size(),
                                                  plane_size());
  }
  std::span<double> plane(int c) noexcept {
    return std::span<double>(data_).subspan(c * plane_size(), plane_size());
  }

  void set_gsd(double gsd);

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  double gsd_ = 1.0;
  std::vector<double> data_;
};

/// Reads an 8- or 16-bit grayscale/RGB PNG. Intensities are v / (2^bit - 1).
Raster load_raster(const std::filesystem::path& path, double gsd = 1.0);

/// Bit depth of the samples stored in a PNG file.
int raster_file_bit_depth(const std::filesystem::path& path);

/// Writes a PNG with round-half-up quantization to `bit` (8 or 16).
/// Throws ValidationError on any intensity outside [0,1].
void save_raster(const Raster& raster, const std::filesystem::path& path,
                 int bit);

/// Quantizes one intensity the same way save_raster does.
std::uint32_t quantize(double intensity, int bit);

Raster crop_region(const Raster& raster, int x, int y, int w, int h);

/// Clamps every sample into [0,1]. Throws PipelineError on non-finite input.
Raster clamp_unit(Raster raster);

bool within_unit_range(const Raster& raster) noexcept;

/// FNV-1a over the sample bit patterns, used for stage provenance.
std::uint64_t checksum(const Raster& raster) noexcept;

}  // namespace tradescope
