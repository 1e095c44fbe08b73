#include "tradescope/edsr.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tradescope/boundary.hpp"
#include "tradescope/error.hpp"

namespace tradescope::edsr {

namespace {

[[noreturn]] void mismatch(const std::string& what) {
  throw BackendError(BackendFailure::WeightMismatch, what);
}

void check_layer(const ConvLayer& layer, int out_c, int in_c, int k,
                 const std::string& name) {
  if (layer.out_channels != out_c || layer.in_channels != in_c ||
      layer.kernel_size != k)
    mismatch(name + ": expected shape (" + std::to_string(out_c) + ", " +
             std::to_string(in_c) + ", " + std::to_string(k) + ", " +
             std::to_string(k) + "), got (" + std::to_string(layer.out_channels) +
             ", " + std::to_string(layer.in_channels) + ", " +
             std::to_string(layer.kernel_size) + ", " +
             std::to_string(layer.kernel_size) + ")");
  if (layer.weight.size() !=
          static_cast<std::size_t>(out_c) * in_c * k * k ||
      layer.bias.size() != static_cast<std::size_t>(out_c))
    mismatch(name + ": tensor storage does not match its shape");
}

// One output row of one output channel. The accumulation order per output
// sample is (input channel, ky, kx) in both the serial and parallel paths.
void conv_row(const FeatureMap& input, const ConvLayer& layer, int o, int y,
              const std::vector<int>& x_index, std::vector<double>& acc,
              FeatureMap& out) {
  const int w = input.width;
  const int h = input.height;
  const int k = layer.kernel_size;
  const int r = k / 2;
  std::fill(acc.begin(), acc.end(), layer.bias[o]);
  for (int i = 0; i < layer.in_channels; ++i) {
    for (int ky = 0; ky < k; ++ky) {
      const int sy = fold_index(y + ky - r, h, Boundary::Reflect);
      const double* row =
          input.data.data() + (static_cast<std::size_t>(i) * h + sy) * w;
      for (int kx = 0; kx < k; ++kx) {
        const double wv = layer.w(o, i, ky, kx);
        const int* xi = x_index.data() + static_cast<std::size_t>(kx) * w;
        for (int x = 0; x < w; ++x) acc[x] += wv * row[xi[x]];
      }
    }
  }
  double* dst = out.data.data() + (static_cast<std::size_t>(o) * h + y) * w;
  std::copy(acc.begin(), acc.end(), dst);
}

std::vector<int> folded_columns(int width, int k) {
  const int r = k / 2;
  std::vector<int> index(static_cast<std::size_t>(k) * width);
  for (int kx = 0; kx < k; ++kx)
    for (int x = 0; x < width; ++x)
      index[static_cast<std::size_t>(kx) * width + x] =
          fold_index(x + kx - r, width, Boundary::Reflect);
  return index;
}

void check_conv_input(const FeatureMap& input, const ConvLayer& layer) {
  if (input.channels != layer.in_channels)
    mismatch("conv2d: input has " + std::to_string(input.channels) +
             " channels, weights expect " + std::to_string(layer.in_channels));
  if (layer.kernel_size < 1 || layer.kernel_size % 2 == 0)
    mismatch("conv2d: kernel size must be odd");
  check_layer(layer, layer.out_channels, layer.in_channels, layer.kernel_size,
              "conv2d");
}

void fill_random(ConvLayer& layer, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  // Values pass through float so they survive the f32 weight file exactly.
  for (double& v : layer.weight) v = static_cast<float>(u(rng));
  for (double& v : layer.bias) v = static_cast<float>(0.1 * u(rng));
}

}  // namespace

void ModelConfig::validate() const {
  if (n_blocks < 1) throw ValidationError("n_blocks must be >= 1");
  if (n_feats < 1) throw ValidationError("n_feats must be >= 1");
  if (scale < 2 || scale > 4) throw ValidationError("scale must be 2, 3 or 4");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw ValidationError("kernel_size must be odd");
  if (colors < 1) throw ValidationError("colors must be >= 1");
  if (!std::isfinite(residual_scaling))
    throw ValidationError("residual_scaling must be finite");
}

std::vector<int> upsampler_factors(int scale) {
  switch (scale) {
    case 2: return {2};
    case 3: return {3};
    case 4: return {2, 2};
  }
  throw ValidationError("scale must be 2, 3 or 4");
}

WeightStore zero_weights(const ModelConfig& config) {
  config.validate();
  const int f = config.n_feats;
  const int k = config.kernel_size;
  WeightStore store;
  store.head = ConvLayer(f, config.colors, k);
  store.blocks.assign(config.n_blocks, {ConvLayer(f, f, k), ConvLayer(f, f, k)});
  store.body = ConvLayer(f, f, k);
  for (int r : upsampler_factors(config.scale))
    store.upsampler.emplace_back(f * r * r, f, k);
  store.tail = ConvLayer(config.colors, f, k);
  return store;
}

WeightStore random_weights(const ModelConfig& config, std::uint64_t seed,
                           double amplitude) {
  WeightStore store = zero_weights(config);
  std::mt19937_64 rng(seed);
  fill_random(store.head, rng, amplitude);
  for (auto& block : store.blocks) {
    fill_random(block.conv1, rng, amplitude);
    fill_random(block.conv2, rng, amplitude);
  }
  fill_random(store.body, rng, amplitude);
  for (auto& layer : store.upsampler) fill_random(layer, rng, amplitude);
  fill_random(store.tail, rng, amplitude);
  return store;
}

void validate_weights(const WeightStore& weights, const ModelConfig& config) {
  config.validate();
  const int f = config.n_feats;
  const int k = config.kernel_size;
  check_layer(weights.head, f, config.colors, k, "head");
  if (weights.blocks.size() != static_cast<std::size_t>(config.n_blocks))
    mismatch("expected " + std::to_string(config.n_blocks) +
             " residual blocks, got " + std::to_string(weights.blocks.size()));
  for (std::size_t b = 0; b < weights.blocks.size(); ++b) {
    check_layer(weights.blocks[b].conv1, f, f, k,
                "block" + std::to_string(b) + ".conv1");
    check_layer(weights.blocks[b].conv2, f, f, k,
                "block" + std::to_string(b) + ".conv2");
  }
  check_layer(weights.body, f, f, k, "body");
  const auto factors = upsampler_factors(config.scale);
  if (weights.upsampler.size() != factors.size())
    mismatch("expected " + std::to_string(factors.size()) +
             " upsampler stages, got " + std::to_string(weights.upsampler.size()));
  for (std::size_t s = 0; s < factors.size(); ++s)
    check_layer(weights.upsampler[s], f * factors[s] * factors[s], f, k,
                "upsampler" + std::to_string(s));
  check_layer(weights.tail, config.colors, f, k, "tail");
  auto finite = [](const ConvLayer& layer, const std::string& name) {
    for (double v : layer.weight)
      if (!std::isfinite(v))
        throw BackendError(BackendFailure::NonFinite, name + ".weight is not finite");
    for (double v : layer.bias)
      if (!std::isfinite(v))
        throw BackendError(BackendFailure::NonFinite, name + ".bias is not finite");
  };
  finite(weights.head, "head");
  for (std::size_t b = 0; b < weights.blocks.size(); ++b) {
    finite(weights.blocks[b].conv1, "block" + std::to_string(b) + ".conv1");
    finite(weights.blocks[b].conv2, "block" + std::to_string(b) + ".conv2");
  }
  finite(weights.body, "body");
  for (std::size_t s = 0; s < weights.upsampler.size(); ++s)
    finite(weights.upsampler[s], "upsampler" + std::to_string(s));
  finite(weights.tail, "tail");
}

FeatureMap conv2d(const FeatureMap& input, const ConvLayer& layer) {
  check_conv_input(input, layer);
  FeatureMap out(input.width, input.height, layer.out_channels);
  const std::vector<int> x_index = folded_columns(input.width, layer.kernel_size);
  const int rows = layer.out_channels * input.height;
#pragma omp parallel
  {
    std::vector<double> acc(input.width);
#pragma omp for schedule(static)
    for (int row = 0; row < rows; ++row)
      conv_row(input, layer, row / input.height, row % input.height, x_index,
               acc, out);
  }
  return out;
}

FeatureMap conv2d_serial(const FeatureMap& input, const ConvLayer& layer) {
  check_conv_input(input, layer);
  FeatureMap out(input.width, input.height, layer.out_channels);
  const std::vector<int> x_index = folded_columns(input.width, layer.kernel_size);
  std::vector<double> acc(input.width);
  for (int o = 0; o < layer.out_channels; ++o)
    for (int y = 0; y < input.height; ++y)
      conv_row(input, layer, o, y, x_index, acc, out);
  return out;
}

void relu_inplace(FeatureMap& map) {
  for (double& v : map.data) v = std::max(v, 0.0);
}

FeatureMap residual_block(const FeatureMap& input,
                          const ResidualBlockWeights& block,
                          double residual_scaling) {
  FeatureMap branch = conv2d(input, block.conv1);
  relu_inplace(branch);
  branch = conv2d(branch, block.conv2);
  if (branch.channels != input.channels)
    mismatch("residual block output channels differ from its input");
  FeatureMap out = input;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] += residual_scaling * branch.data[i];
  return out;
}

FeatureMap pixel_shuffle(const FeatureMap& input, int r) {
  if (r < 1) throw ValidationError("shuffle factor must be positive");
  if (input.channels % (r * r) != 0)
    throw ValidationError("pixel_shuffle: " + std::to_string(input.channels) +
                          " channels not divisible by " + std::to_string(r * r));
  FeatureMap out(input.width * r, input.height * r, input.channels / (r * r));
  for (int c = 0; c < out.channels; ++c)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        for (int y = 0; y < input.height; ++y)
          for (int x = 0; x < input.width; ++x)
            out.at(x * r + j, y * r + i, c) = input.at(x, y, c * r * r + i * r + j);
  return out;
}

FeatureMap pixel_unshuffle(const FeatureMap& input, int r) {
  if (r < 1) throw ValidationError("shuffle factor must be positive");
  if (input.width % r != 0 || input.height % r != 0)
    throw ValidationError("pixel_unshuffle: size not divisible by factor");
  FeatureMap out(input.width / r, input.height / r, input.channels * r * r);
  for (int c = 0; c < input.channels; ++c)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        for (int y = 0; y < out.height; ++y)
          for (int x = 0; x < out.width; ++x)
            out.at(x, y, c * r * r + i * r + j) = input.at(x * r + j, y * r + i, c);
  return out;
}

FeatureMap to_feature_map(const Raster& image, int colors) {
  if (image.channels() != colors && image.channels() != 1)
    mismatch("image has " + std::to_string(image.channels()) +
             " channels, model expects " + std::to_string(colors));
  FeatureMap map(image.width(), image.height(), colors);
  for (int c = 0; c < colors; ++c) {
    const auto src = image.plane(image.channels() == 1 ? 0 : c);
    std::copy(src.begin(), src.end(),
              map.data.begin() + static_cast<std::ptrdiff_t>(c) * src.size());
  }
  return map;
}

Model::Model(ModelConfig config, WeightStore weights)
    : config_(config), weights_(std::move(weights)) {
  validate_weights(weights_, config_);
}

Raster Model::forward(const Raster& image) const {
  const FeatureMap input = to_feature_map(image, config_.colors);
  const FeatureMap head = conv2d(input, weights_.head);
  FeatureMap body = head;
  for (const auto& block : weights_.blocks)
    body = residual_block(body, block, config_.residual_scaling);
  body = conv2d(body, weights_.body);
  for (std::size_t i = 0; i < body.data.size(); ++i) body.data[i] += head.data[i];

  const auto factors = upsampler_factors(config_.scale);
  for (std::size_t s = 0; s < factors.size(); ++s)
    body = pixel_shuffle(conv2d(body, weights_.upsampler[s]), factors[s]);
  const FeatureMap out = conv2d(body, weights_.tail);

  for (double v : out.data)
    if (!std::isfinite(v))
      throw BackendError(BackendFailure::NonFinite,
                         "edsr forward produced a non-finite activation");

  const int channels = image.channels();
  Raster result(out.width, out.height, channels, image.gsd() / config_.scale);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      if (channels == out.channels) {
        for (int c = 0; c < channels; ++c)
          result.at(x, y, c) = std::clamp(out.at(x, y, c), 0.0, 1.0);
      } else {
        double mean = 0.0;
        for (int c = 0; c < out.channels; ++c) mean += out.at(x, y, c);
        result.at(x, y, 0) = std::clamp(mean / out.channels, 0.0, 1.0);
      }
    }
  }
  return result;
}

}  // namespace tradescope::edsr
