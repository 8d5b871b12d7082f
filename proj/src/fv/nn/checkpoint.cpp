#include "fv/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "fv/errors.hpp"

namespace fv::nn {
namespace {

void put_u16(std::ostream& os, uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& os, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

uint16_t get_u16(std::istream& is, const std::string& path, const char* what) {
  unsigned char b[2];
  if (!is.read(reinterpret_cast<char*>(b), 2)) {
    throw FormatError(path + ": truncated reading " + what);
  }
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t get_u32(std::istream& is, const std::string& path, const char* what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw FormatError(path + ": truncated reading " + what);
  }
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

constexpr uint16_t kVersion = 1;

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write("FVNN", 4);
  put_u16(os, kVersion);
  put_u16(os, static_cast<uint16_t>(params.tensor_count()));
  params.for_each([&](const Tensor& t) {
    os.put(static_cast<char>(t.shape.size()));
    for (int d : t.shape) put_u32(os, static_cast<uint32_t>(d));
    for (double v : t.data) put_f32(os, static_cast<float>(v));
  });
  if (!os) throw IoError("write failed: " + path);
}

ModelParams load_checkpoint(const std::string& path, const std::vector<LayerSpec>& spec) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FVNN", 4) != 0) {
    throw FormatError(path + ": bad magic at offset 0");
  }
  const uint16_t version = get_u16(is, path, "version");
  if (version != kVersion) {
    throw FormatError(path + ": unsupported version " + std::to_string(version));
  }
  const uint16_t count = get_u16(is, path, "tensor count");

  std::vector<Tensor> tensors;
  tensors.reserve(count);
  for (uint16_t i = 0; i < count; ++i) {
    const int rank = is.get();
    if (rank == EOF) throw FormatError(path + ": truncated reading tensor rank");
    std::vector<int> shape(static_cast<size_t>(rank));
    for (int r = 0; r < rank; ++r) shape[static_cast<size_t>(r)] = static_cast<int>(get_u32(is, path, "dim"));
    Tensor t(shape);
    for (double& v : t.data) {
      const uint32_t bits = get_u32(is, path, "payload");
      float f;
      std::memcpy(&f, &bits, 4);
      v = static_cast<double>(f);
    }
    tensors.push_back(std::move(t));
  }

  ModelParams params;
  params.layers.resize(spec.size());
  size_t next = 0;
  for (size_t i = 0; i < spec.size(); ++i) {
    const int want =
        (spec[i].kind == LayerKind::Conv2D || spec[i].kind == LayerKind::Dense) ? 2 : 0;
    for (int j = 0; j < want; ++j) {
      if (next >= tensors.size()) {
        throw FormatError(path + ": tensor count does not cover the layer stack");
      }
      params.layers[i].tensors.push_back(std::move(tensors[next++]));
    }
  }
  if (next != tensors.size()) {
    throw FormatError(path + ": " + std::to_string(tensors.size() - next) + " extra tensors");
  }
  return params;
}

}  // namespace fv::nn
