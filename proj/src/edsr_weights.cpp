#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "tradescope/edsr.hpp"
#include "tradescope/error.hpp"

namespace tradescope::edsr {

namespace {

constexpr std::array<char, 8> kMagic{'E', 'D', 'S', 'R', 'L', 'I', 'T', 'E'};
constexpr std::uint32_t kVersion = 1;

struct TensorRef {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<double>* values;
};

std::vector<TensorRef> tensor_list(WeightStore& store) {
  std::vector<TensorRef> list;
  auto add = [&list](const std::string& name, ConvLayer& layer) {
    const auto oc = static_cast<std::uint32_t>(layer.out_channels);
    const auto ic = static_cast<std::uint32_t>(layer.in_channels);
    const auto k = static_cast<std::uint32_t>(layer.kernel_size);
    list.push_back({name + ".weight", {oc, ic, k, k}, &layer.weight});
    list.push_back({name + ".bias", {oc}, &layer.bias});
  };
  add("head", store.head);
  for (std::size_t b = 0; b < store.blocks.size(); ++b) {
    add("block" + std::to_string(b) + ".conv1", store.blocks[b].conv1);
    add("block" + std::to_string(b) + ".conv2", store.blocks[b].conv2);
  }
  add("body", store.body);
  for (std::size_t s = 0; s < store.upsampler.size(); ++s)
    add("upsampler" + std::to_string(s), store.upsampler[s]);
  add("tail", store.tail);
  return list;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot write weights " + path.string());
  }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 4);
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const char* data, std::size_t n) { out_.write(data, n); }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("failed writing weights " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open weights " + path.string());
  }
  bool bytes(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount()) == n;
  }
  bool u32(std::uint32_t& v) {
    unsigned char b[4];
    if (!bytes(reinterpret_cast<char*>(b), 4)) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return true;
  }
  bool f32(float& v) {
    std::uint32_t bits;
    if (!u32(bits)) return false;
    v = std::bit_cast<float>(bits);
    return true;
  }

 private:
  std::ifstream in_;
};

[[noreturn]] void truncated(const std::string& where) {
  throw BackendError(BackendFailure::Truncated,
                     "weight file truncated in " + where);
}

[[noreturn]] void mismatch(const std::string& what) {
  throw BackendError(BackendFailure::WeightMismatch, what);
}

ModelConfig read_header(Reader& in) {
  std::array<char, 8> magic{};
  if (!in.bytes(magic.data(), magic.size())) truncated("header");
  if (magic != kMagic) mismatch("not an EDSRLITE weight file");
  std::uint32_t version = 0;
  if (!in.u32(version)) truncated("header");
  if (version != kVersion)
    mismatch("unsupported weight file version " + std::to_string(version));
  std::uint32_t fields[5];
  for (auto& f : fields)
    if (!in.u32(f)) truncated("config");
  float scaling = 0.0f;
  if (!in.f32(scaling)) truncated("config");
  ModelConfig config;
  config.n_blocks = static_cast<int>(fields[0]);
  config.n_feats = static_cast<int>(fields[1]);
  config.scale = static_cast<int>(fields[2]);
  config.kernel_size = static_cast<int>(fields[3]);
  config.colors = static_cast<int>(fields[4]);
  config.residual_scaling = scaling;
  return config;
}

void compare_config(const ModelConfig& stored, const ModelConfig& wanted) {
  auto check = [](const char* field, double a, double b) {
    if (a != b)
      mismatch(std::string("config mismatch: ") + field + " is " +
               std::to_string(a) + " in file, expected " + std::to_string(b));
  };
  check("n_blocks", stored.n_blocks, wanted.n_blocks);
  check("n_feats", stored.n_feats, wanted.n_feats);
  check("scale", stored.scale, wanted.scale);
  check("kernel_size", stored.kernel_size, wanted.kernel_size);
  check("colors", stored.colors, wanted.colors);
  check("residual_scaling", stored.residual_scaling,
        static_cast<float>(wanted.residual_scaling));
}

}  // namespace

void save_weights(const WeightStore& weights, const ModelConfig& config,
                  const std::filesystem::path& path) {
  validate_weights(weights, config);
  WeightStore copy = weights;
  const auto tensors = tensor_list(copy);

  Writer out(path);
  out.bytes(kMagic.data(), kMagic.size());
  out.u32(kVersion);
  out.u32(static_cast<std::uint32_t>(config.n_blocks));
  out.u32(static_cast<std::uint32_t>(config.n_feats));
  out.u32(static_cast<std::uint32_t>(config.scale));
  out.u32(static_cast<std::uint32_t>(config.kernel_size));
  out.u32(static_cast<std::uint32_t>(config.colors));
  out.f32(static_cast<float>(config.residual_scaling));
  out.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    out.u32(static_cast<std::uint32_t>(t.name.size()));
    out.bytes(t.name.data(), t.name.size());
    out.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) out.u32(d);
  }
  for (const auto& t : tensors)
    for (double v : *t.values) out.f32(static_cast<float>(v));
  out.finish();
}

ModelConfig read_weight_config(const std::filesystem::path& path) {
  Reader in(path);
  return read_header(in);
}

WeightStore load_weights(const std::filesystem::path& path,
                         const ModelConfig& config) {
  config.validate();
  Reader in(path);
  compare_config(read_header(in), config);

  WeightStore store = zero_weights(config);
  const auto expected = tensor_list(store);
  std::uint32_t count = 0;
  if (!in.u32(count)) truncated("manifest");
  if (count != expected.size())
    mismatch("manifest lists " + std::to_string(count) + " tensors, expected " +
             std::to_string(expected.size()));

  for (const auto& t : expected) {
    std::uint32_t length = 0;
    if (!in.u32(length)) truncated("manifest entry for " + t.name);
    if (length > 4096) mismatch("manifest entry name too long");
    std::string name(length, '\0');
    if (!in.bytes(name.data(), length)) truncated("manifest entry for " + t.name);
    if (name != t.name)
      mismatch("manifest has tensor '" + name + "' where '" + t.name +
               "' was expected");
    std::uint32_t ndim = 0;
    if (!in.u32(ndim)) truncated("manifest entry for " + t.name);
    if (ndim != t.shape.size())
      mismatch(t.name + ": expected " + std::to_string(t.shape.size()) +
               " dims, manifest has " + std::to_string(ndim));
    for (std::size_t d = 0; d < ndim; ++d) {
      std::uint32_t dim = 0;
      if (!in.u32(dim)) truncated("manifest entry for " + t.name);
      if (dim != t.shape[d])
        mismatch(t.name + ": dim " + std::to_string(d) + " is " +
                 std::to_string(dim) + ", expected " + std::to_string(t.shape[d]));
    }
  }
  for (const auto& t : expected) {
    for (double& v : *t.values) {
      float f = 0.0f;
      if (!in.f32(f)) truncated("tensor " + t.name);
      v = f;
    }
  }
  return store;
}

}  // namespace tradescope::edsr
