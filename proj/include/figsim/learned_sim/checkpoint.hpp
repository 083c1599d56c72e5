#pragma once

#include <string>

#include "figsim/learned_sim/model.hpp"

namespace figsim {

struct Checkpoint {
  ModelParams params;
  NormalizerSet norms;
};

//! Binary container: one-line JSON header (version, mode, message-passing
//! steps, hidden width, tensor shapes, normalizer stats) followed by float64
//! little-endian parameter blobs in declaration order.
void save_checkpoint(const ModelParams& params, const NormalizerSet& norms,
                     const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace figsim
