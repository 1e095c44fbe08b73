#include "tradescope/raster.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include "tradescope/error.hpp"

namespace tradescope {

const char* to_string(BackendFailure failure) noexcept {
  switch (failure) {
    case BackendFailure::UnknownBackend: return "unknown backend";
    case BackendFailure::DuplicateBackend: return "duplicate backend";
    case BackendFailure::UnsupportedScale: return "unsupported scale";
    case BackendFailure::Spawn: return "spawn failure";
    case BackendFailure::NonzeroExit: return "nonzero exit";
    case BackendFailure::Timeout: return "timeout";
    case BackendFailure::Protocol: return "protocol error";
    case BackendFailure::DimsViolation: return "dims violation";
    case BackendFailure::WeightMismatch: return "weight mismatch";
    case BackendFailure::Truncated: return "truncated weights";
    case BackendFailure::NonFinite: return "non-finite activation";
  }
  return "backend failure";
}

namespace {

void check_shape(int width, int height, int channels, double gsd) {
  if (width < 1 || height < 1)
    throw ValidationError("raster dimensions must be positive");
  if (channels != 1 && channels != 3)
    throw ValidationError("raster must have 1 or 3 channels, got " +
                          std::to_string(channels));
  if (!(gsd > 0.0) || !std::isfinite(gsd))
    throw ValidationError("raster gsd must be positive");
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp, png_const_charp message) {
  throw IoError(std::string("png: ") + message);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

FilePtr open_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  unsigned char signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 ||
      png_sig_cmp(signature, 0, 8) != 0)
    throw IoError(path.string() +
                  ": not a PNG file (only lossless PNG is supported)");
  return file;
}

}  // namespace

Raster::Raster(int width, int height, int channels, double gsd)
    : width_(width), height_(height), channels_(channels), gsd_(gsd) {
  check_shape(width, height, channels, gsd);
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
}

Raster::Raster(int width, int height, int channels, double gsd,
               std::vector<double> data)
    : width_(width), height_(height), channels_(channels), gsd_(gsd),
      data_(std::move(data)) {
  check_shape(width, height, channels, gsd);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels)
    throw ValidationError("raster data length does not match dimensions");
}

void Raster::set_gsd(double gsd) {
  if (!(gsd > 0.0) || !std::isfinite(gsd))
    throw ValidationError("raster gsd must be positive");
  gsd_ = gsd;
}

int raster_file_bit_depth(const std::filesystem::path& path) {
  FilePtr file = open_png(path);
  PngReader reader;
  reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                      png_error_handler, png_warning_handler);
  reader.info = png_create_info_struct(reader.png);
  png_init_io(reader.png, file.get());
  png_set_sig_bytes(reader.png, 8);
  png_read_info(reader.png, reader.info);
  return png_get_bit_depth(reader.png, reader.info);
}

Raster load_raster(const std::filesystem::path& path, double gsd) {
  FilePtr file = open_png(path);
  PngReader reader;
  reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                      png_error_handler, png_warning_handler);
  if (!reader.png) throw IoError("png: out of memory");
  reader.info = png_create_info_struct(reader.png);
  if (!reader.info) throw IoError("png: out of memory");

  png_init_io(reader.png, file.get());
  png_set_sig_bytes(reader.png, 8);
  png_read_info(reader.png, reader.info);

  const int width = static_cast<int>(png_get_image_width(reader.png, reader.info));
  const int height = static_cast<int>(png_get_image_height(reader.png, reader.info));
  const int bit = png_get_bit_depth(reader.png, reader.info);
  const int color = png_get_color_type(reader.png, reader.info);

  if (bit != 8 && bit != 16)
    throw ValidationError(path.string() + ": unsupported bit depth " +
                          std::to_string(bit));
  int channels = 0;
  if (color == PNG_COLOR_TYPE_GRAY) channels = 1;
  else if (color == PNG_COLOR_TYPE_RGB) channels = 3;
  else
    throw ValidationError(path.string() +
                          ": only grayscale or RGB without alpha is supported");
  if (bit == 16 && std::endian::native == std::endian::little)
    png_set_swap(reader.png);
  png_read_update_info(reader.png, reader.info);

  const std::size_t row_bytes = png_get_rowbytes(reader.png, reader.info);
  std::vector<unsigned char> buffer(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + y * row_bytes;
  png_read_image(reader.png, rows.data());
  png_read_end(reader.png, nullptr);

  Raster raster(width, height, channels, gsd);
  const double full_scale = static_cast<double>((1u << bit) - 1u);
  for (int y = 0; y < height; ++y) {
    const unsigned char* row = rows[y];
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::size_t k = static_cast<std::size_t>(x) * channels + c;
        std::uint32_t v = 0;
        if (bit == 8) {
          v = row[k];
        } else {
          std::uint16_t s;
          std::memcpy(&s, row + 2 * k, 2);
          v = s;
        }
        raster.at(x, y, c) = v / full_scale;
      }
    }
  }
  return raster;
}

std::uint32_t quantize(double intensity, int bit) {
  const double full_scale = static_cast<double>((1u << bit) - 1u);
  return static_cast<std::uint32_t>(std::floor(intensity * full_scale + 0.5));
}

void save_raster(const Raster& raster, const std::filesystem::path& path,
                 int bit) {
  if (bit != 8 && bit != 16)
    throw ValidationError("bit depth must be 8 or 16, got " +
                          std::to_string(bit));
  if (raster.size() == 0) throw ValidationError("cannot save an empty raster");
  for (double v : raster.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw PipelineError("intensity out of [0,1] while saving " +
                            path.string() + ": " + std::to_string(v));

  const int width = raster.width();
  const int height = raster.height();
  const int channels = raster.channels();
  const int bytes_per_sample = bit / 8;
  const std::size_t row_bytes =
      static_cast<std::size_t>(width) * channels * bytes_per_sample;
  std::vector<unsigned char> buffer(row_bytes * height);
  for (int y = 0; y < height; ++y) {
    unsigned char* row = buffer.data() + y * row_bytes;
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        const std::size_t k = static_cast<std::size_t>(x) * channels + c;
        const std::uint32_t q = quantize(raster.at(x, y, c), bit);
        if (bit == 8) {
          row[k] = static_cast<unsigned char>(q);
        } else {
          // PNG stores 16-bit samples big-endian.
          row[2 * k] = static_cast<unsigned char>(q >> 8);
          row[2 * k + 1] = static_cast<unsigned char>(q & 0xff);
        }
      }
    }
  }

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write " + path.string());
  PngWriter writer;
  writer.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                       png_error_handler, png_warning_handler);
  if (!writer.png) throw IoError("png: out of memory");
  writer.info = png_create_info_struct(writer.png);
  if (!writer.info) throw IoError("png: out of memory");
  png_init_io(writer.png, file.get());
  png_set_IHDR(writer.png, writer.info, width, height, bit,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png, writer.info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + y * row_bytes;
  png_write_image(writer.png, rows.data());
  png_write_end(writer.png, nullptr);
  if (std::fflush(file.get()) != 0)
    throw IoError("failed to flush " + path.string());
}

Raster crop_region(const Raster& raster, int x, int y, int w, int h) {
  if (w < 1 || h < 1 || x < 0 || y < 0 || x + w > raster.width() ||
      y + h > raster.height())
    throw ValidationError("crop region out of bounds");
  Raster out(w, h, raster.channels(), raster.gsd());
  for (int c = 0; c < raster.channels(); ++c)
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i) out.at(i, j, c) = raster.at(x + i, y + j, c);
  return out;
}

Raster clamp_unit(Raster raster) {
  for (double& v : raster.data()) {
    if (!std::isfinite(v)) throw PipelineError("non-finite intensity");
    v = std::clamp(v, 0.0, 1.0);
  }
  return raster;
}

bool within_unit_range(const Raster& raster) noexcept {
  return std::all_of(raster.data().begin(), raster.data().end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

std::uint64_t checksum(const Raster& raster) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (double v : raster.data()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      hash ^= (bits >> (8 * i)) & 0xffu;
      hash *= 0x100000001b3ull;
    }
  }
  return hash;
}

}  // namespace tradescope
