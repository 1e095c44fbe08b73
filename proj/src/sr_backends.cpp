#include "tradescope/sr_backends.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "tradescope/error.hpp"

namespace tradescope {

namespace {

void check_output(const SrRequest& request, const Raster& output) {
  const int w = request.input.width() * request.scale;
  const int h = request.input.height() * request.scale;
  if (output.width() != w || output.height() != h ||
      output.channels() != request.input.channels())
    throw BackendError(
        BackendFailure::DimsViolation,
        "backend '" + request.backend_id + "' returned " +
            std::to_string(output.width()) + "x" +
            std::to_string(output.height()) + "x" +
            std::to_string(output.channels()) + ", expected " +
            std::to_string(w) + "x" + std::to_string(h) + "x" +
            std::to_string(request.input.channels()));
}

struct Dispatch {
  const SrRequest& request;

  Raster operator()(const ClassicalBackend& backend) const {
    const Raster& in = request.input;
    Raster out = resize(in, in.width() * request.scale,
                        in.height() * request.scale, backend.kernel);
    out.set_gsd(in.gsd() / request.scale);
    return clamp_unit(std::move(out));
  }

  Raster operator()(const EdsrBackend& backend) const {
    const auto it = backend.models.find(request.scale);
    if (it == backend.models.end() || !it->second)
      throw BackendError(BackendFailure::UnsupportedScale,
                         "backend '" + request.backend_id + "' has no x" +
                             std::to_string(request.scale) + " model");
    return it->second->forward(request.input);
  }

  Raster operator()(const ExternalAdapter& adapter) const {
    ExternalAdapter merged = adapter;
    for (const auto& [key, value] : request.params) merged.params[key] = value;
    return external_upscale(request, merged).output;
  }
};

}  // namespace

BackendRegistry BackendRegistry::with_builtins() {
  BackendRegistry registry;
  registry.register_backend("nearest", ClassicalBackend{ResampleKernel::Nearest});
  registry.register_backend("bilinear", ClassicalBackend{ResampleKernel::Bilinear});
  registry.register_backend("bicubic", ClassicalBackend{ResampleKernel::Bicubic});
  registry.register_backend("lanczos3", ClassicalBackend{ResampleKernel::Lanczos3});
  return registry;
}

void BackendRegistry::register_backend(const std::string& id,
                                       BackendDescriptor descriptor) {
  if (id.empty()) throw ValidationError("backend id must not be empty");
  if (!backends_.emplace(id, std::move(descriptor)).second)
    throw BackendError(BackendFailure::DuplicateBackend,
                       "backend '" + id + "' is already registered");
}

bool BackendRegistry::contains(const std::string& id) const {
  return backends_.contains(id);
}

std::vector<std::string> BackendRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : backends_) out.push_back(id);
  return out;
}

SrResult BackendRegistry::upscale(const SrRequest& request) const {
  const auto it = backends_.find(request.backend_id);
  if (it == backends_.end())
    throw BackendError(BackendFailure::UnknownBackend,
                       "unknown backend '" + request.backend_id + "'");
  if (request.scale < 2 || request.scale > 4)
    throw BackendError(BackendFailure::UnsupportedScale,
                       "scale must be 2, 3 or 4, got " +
                           std::to_string(request.scale));

  const auto start = std::chrono::steady_clock::now();
  SrResult result;
  result.output = std::visit(Dispatch{request}, it->second);
  result.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  result.backend_id = request.backend_id;
  check_output(request, result.output);
  return result;
}

int select_scale(double gsd_product, double gsd_original) {
  if (!(gsd_product > 0.0) || !(gsd_original > 0.0))
    throw ValidationError("gsd values must be positive");
  const long scale = std::lround(gsd_product / gsd_original);
  if (scale < 2 || scale > 4)
    throw ValidationError("gsd ratio " + std::to_string(gsd_product) + " / " +
                          std::to_string(gsd_original) +
                          " does not map to a x2, x3 or x4 upscale");
  return static_cast<int>(scale);
}

}  // namespace tradescope
