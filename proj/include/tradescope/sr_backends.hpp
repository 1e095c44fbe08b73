#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tradescope/edsr.hpp"
#include "tradescope/raster.hpp"
#include "tradescope/resample.hpp"

namespace tradescope {

struct SrRequest {
  Raster input;
  int scale = 2;
  std::string backend_id;
  std::map<std::string, std::string> params;
};

struct SrResult {
  Raster output;
  std::string backend_id;
  double wall_time = 0.0;  // seconds
};

struct ClassicalBackend {
  ResampleKernel kernel = ResampleKernel::Bicubic;
};

/// One model per supported scale.
struct EdsrBackend {
  std::map<int, std::shared_ptr<const edsr::Model>> models;
};

/// Out-of-process super-resolver speaking the file protocol.
struct ExternalAdapter {
  std::filesystem::path executable;
  std::chrono::milliseconds timeout{120000};
  std::map<std::string, std::string> params;
};

using BackendDescriptor =
    std::variant<ClassicalBackend, EdsrBackend, ExternalAdapter>;

/// Write-once-then-read-many table of super-resolution backends.
class BackendRegistry {
 public:
  /// nearest, bilinear, bicubic and lanczos3 preregistered.
  static BackendRegistry with_builtins();

  void register_backend(const std::string& id, BackendDescriptor descriptor);
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Dispatches to the named backend; never falls back to another one.
  SrResult upscale(const SrRequest& request) const;

 private:
  std::map<std::string, BackendDescriptor> backends_;
};

/// round(gsd_product / gsd_original); ValidationError unless in {2, 3, 4}.
int select_scale(double gsd_product, double gsd_original);

/// Runs one job through an adapter process in a private temp workspace.
///
/// The workspace holds input.png (16-bit), job.json and, after the run,
/// output.png and status.json. The adapter is invoked as
/// `executable job.json`. job.json carries input_path, output_path,
/// status_path, scale and params; status.json carries ok, message and
/// wall_time. The workspace is removed on every exit path.
SrResult external_upscale(const SrRequest& request,
                          const ExternalAdapter& adapter);

}  // namespace tradescope
