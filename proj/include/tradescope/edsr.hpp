#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tradescope/raster.hpp"

namespace tradescope::edsr {

struct ModelConfig {
  int n_blocks = 8;
  int n_feats = 32;
  int scale = 2;
  int kernel_size = 3;
  double residual_scaling = 1.0;
  int colors = 3;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Activations, channel-major then row-major.
struct FeatureMap {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int w, int h, int c)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, 0.0) {}

  double& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

/// Weights of one convolution, laid out (out_c, in_c, k, k).
struct ConvLayer {
  int out_channels = 0;
  int in_channels = 0;
  int kernel_size = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  ConvLayer() = default;
  ConvLayer(int out_c, int in_c, int k)
      : out_channels(out_c), in_channels(in_c), kernel_size(k),
        weight(static_cast<std::size_t>(out_c) * in_c * k * k, 0.0),
        bias(out_c, 0.0) {}

  double& w(int o, int i, int ky, int kx) {
    return weight[((static_cast<std::size_t>(o) * in_channels + i) *
                       kernel_size + ky) * kernel_size + kx];
  }
  double w(int o, int i, int ky, int kx) const {
    return weight[((static_cast<std::size_t>(o) * in_channels + i) *
                       kernel_size + ky) * kernel_size + kx];
  }
};

struct ResidualBlockWeights {
  ConvLayer conv1;
  ConvLayer conv2;
};

struct WeightStore {
  ConvLayer head;
  std::vector<ResidualBlockWeights> blocks;
  ConvLayer body;
  std::vector<ConvLayer> upsampler;  // each followed by a pixel shuffle
  ConvLayer tail;
};

/// Shuffle factor applied after each upsampler conv: {2}, {3} or {2, 2}.
std::vector<int> upsampler_factors(int scale);

/// Zero-filled weights with the shapes `config` requires.
WeightStore zero_weights(const ModelConfig& config);

/// Small uniform random weights, reproducible from `seed`.
WeightStore random_weights(const ModelConfig& config, std::uint64_t seed,
                           double amplitude = 0.05);

/// Throws BackendError(WeightMismatch) naming the first offending tensor.
void validate_weights(const WeightStore& weights, const ModelConfig& config);

/// Same-size cross-correlation with reflection padding.
FeatureMap conv2d(const FeatureMap& input, const ConvLayer& layer);
FeatureMap conv2d_serial(const FeatureMap& input, const ConvLayer& layer);

void relu_inplace(FeatureMap& map);

/// input + residual_scaling * conv2(relu(conv1(input)))
FeatureMap residual_block(const FeatureMap& input,
                          const ResidualBlockWeights& block,
                          double residual_scaling);

/// (w, h, c) -> (r w, r h, c / r^2): out(c, y r + i, x r + j) =
/// in(c r^2 + i r + j, y, x).
FeatureMap pixel_shuffle(const FeatureMap& input, int r);
FeatureMap pixel_unshuffle(const FeatureMap& input, int r);

FeatureMap to_feature_map(const Raster& image, int colors);

class Model {
 public:
  Model(ModelConfig config, WeightStore weights);

  const ModelConfig& config() const noexcept { return config_; }
  const WeightStore& weights() const noexcept { return weights_; }

  /// Upscales by config().scale; output clamped to [0,1].
  Raster forward(const Raster& image) const;

 private:
  ModelConfig config_;
  WeightStore weights_;
};

/// Weight file: magic "EDSRLITE", u32 version, config echo, shape manifest,
/// then raw little-endian f32 tensors in manifest order.
void save_weights(const WeightStore& weights, const ModelConfig& config,
                  const std::filesystem::path& path);
WeightStore load_weights(const std::filesystem::path& path,
                         const ModelConfig& config);

/// Config stored in a weight file header.
ModelConfig read_weight_config(const std::filesystem::path& path);

}  // namespace tradescope::edsr
