#pragma once

#include <string>

#include "fv/nn/model.hpp"

namespace fv::nn {

// Checkpoint file: magic "FVNN", version u16, tensor count u16, then per
// tensor rank u8, dims u32 each, f32 little-endian payload. Integers are
// little-endian.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path, const std::vector<LayerSpec>& spec);

}  // namespace fv::nn
