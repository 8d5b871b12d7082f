#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fv/signal/frame.hpp"

namespace fv::data {

using signal::Frame;

// Immutable-by-convention frame collection. label values are positions in
// metadata.schemes, so a run over a scheme subset still gets contiguous
// labels 0..C-1.
struct DatasetMeta {
  uint64_t seed = 0;
  std::vector<signal::Modulation> schemes;
  std::vector<int> snrs;
};

struct Dataset {
  std::vector<Frame> frames;
  DatasetMeta meta;

  size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  int class_count() const { return static_cast<int>(meta.schemes.size()); }

  std::vector<const Frame*> frame_ptrs() const {
    std::vector<const Frame*> out;
    out.reserve(frames.size());
    for (const Frame& f : frames) out.push_back(&f);
    return out;
  }
};

// probs[c] = count(label == c) / size. Throws EmptyInputError on an empty set.
std::vector<double> label_distribution(const Dataset& ds, int class_count);
std::vector<double> label_distribution(const std::vector<uint8_t>& labels, int class_count);

// Keeps frames with snr_db >= threshold (inclusive), order preserved.
Dataset filter_by_snr(const Dataset& ds, int threshold_db);

// Keeps frames with lo <= snr_db <= hi.
Dataset filter_by_snr_band(const Dataset& ds, int lo_db, int hi_db);

// File format: magic "AMCD", version u16=1, frame_len u32, class_count u8,
// frame_count u64, then per frame label u8, snr_db i8, 2*frame_len f32
// little-endian (I row then Q row). The clean component is not stored.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace fv::data
