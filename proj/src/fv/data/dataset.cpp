#include "fv/data/dataset.hpp"

#include <cstring>
#include <fstream>

#include "fv/errors.hpp"

namespace fv::data {
namespace {

void put_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void put_u16(std::ostream& os, uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  put_bytes(os, b, 2);
}

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  put_bytes(os, b, 4);
}

void put_u64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  put_bytes(os, b, 8);
}

struct Reader {
  std::ifstream is;
  std::string path;
  uint64_t offset = 0;

  void need(void* p, size_t n, const char* what) {
    if (!is.read(static_cast<char*>(p), static_cast<std::streamsize>(n))) {
      throw FormatError(path + ": truncated reading " + what + " at byte offset " +
                        std::to_string(offset));
    }
    offset += n;
  }
  uint16_t u16(const char* what) {
    unsigned char b[2];
    need(b, 2, what);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
  }
  uint32_t u32(const char* what) {
    unsigned char b[4];
    need(b, 4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
  }
  uint64_t u64(const char* what) {
    unsigned char b[8];
    need(b, 8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }
};

constexpr uint16_t kVersion = 1;

}  // namespace

std::vector<double> label_distribution(const std::vector<uint8_t>& labels, int class_count) {
  if (labels.empty()) throw EmptyInputError("label distribution of an empty dataset");
  std::vector<double> probs(static_cast<size_t>(class_count), 0.0);
  for (uint8_t l : labels) {
    if (l >= class_count) throw LabelError("label " + std::to_string(l) + " >= class count");
    probs[l] += 1.0;
  }
  for (double& p : probs) p /= static_cast<double>(labels.size());
  return probs;
}

std::vector<double> label_distribution(const Dataset& ds, int class_count) {
  std::vector<uint8_t> labels;
  labels.reserve(ds.size());
  for (const Frame& f : ds.frames) labels.push_back(f.label);
  return label_distribution(labels, class_count);
}

Dataset filter_by_snr(const Dataset& ds, int threshold_db) {
  Dataset out;
  out.meta = ds.meta;
  for (const Frame& f : ds.frames) {
    if (f.snr_db >= threshold_db) out.frames.push_back(f);
  }
  return out;
}

Dataset filter_by_snr_band(const Dataset& ds, int lo_db, int hi_db) {
  Dataset out;
  out.meta = ds.meta;
  for (const Frame& f : ds.frames) {
    if (f.snr_db >= lo_db && f.snr_db <= hi_db) out.frames.push_back(f);
  }
  return out;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  uint32_t frame_len = 0;
  for (const Frame& f : ds.frames) {
    if (frame_len == 0) {
      frame_len = static_cast<uint32_t>(f.length());
    } else if (frame_len != static_cast<uint32_t>(f.length())) {
      throw DimensionError("dataset frames have inconsistent lengths");
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write("AMCD", 4);
  put_u16(os, kVersion);
  put_u32(os, frame_len);
  os.put(static_cast<char>(ds.class_count()));
  put_u64(os, ds.frames.size());
  for (const Frame& f : ds.frames) {
    os.put(static_cast<char>(f.label));
    os.put(static_cast<char>(f.snr_db));
    for (double v : f.iq) {
      const float fl = static_cast<float>(v);
      uint32_t bits;
      std::memcpy(&bits, &fl, 4);
      put_u32(os, bits);
    }
  }
  if (!os) throw IoError("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  Reader r;
  r.path = path;
  r.is.open(path, std::ios::binary);
  if (!r.is) throw IoError("cannot open " + path);

  char magic[4];
  r.need(magic, 4, "magic");
  if (std::memcmp(magic, "AMCD", 4) != 0) {
    throw FormatError(path + ": bad magic at byte offset 0");
  }
  const uint16_t version = r.u16("version");
  if (version != kVersion) {
    throw FormatError(path + ": unsupported version " + std::to_string(version) +
                      " at byte offset 4");
  }
  const uint32_t frame_len = r.u32("frame_len");
  uint8_t class_count;
  r.need(&class_count, 1, "class_count");
  const uint64_t frame_count = r.u64("frame_count");

  Dataset ds;
  ds.frames.reserve(frame_count);
  for (uint64_t i = 0; i < frame_count; ++i) {
    Frame f;
    uint8_t label;
    int8_t snr;
    r.need(&label, 1, "label");
    r.need(&snr, 1, "snr_db");
    f.label = label;
    f.snr_db = snr;
    f.iq.resize(static_cast<size_t>(2) * frame_len);
    for (double& v : f.iq) {
      const uint32_t bits = r.u32("iq payload");
      float fl;
      std::memcpy(&fl, &bits, 4);
      v = static_cast<double>(fl);
    }
    ds.frames.push_back(std::move(f));
  }
  // Frame labels imply the class list size even though scheme identities are
  // not stored in the file.
  ds.meta.schemes.resize(class_count);
  for (size_t c = 0; c < class_count; ++c) {
    ds.meta.schemes[c] = static_cast<signal::Modulation>(c < signal::kModulationCount ? c : 0);
  }
  return ds;
}

}  // namespace fv::data
