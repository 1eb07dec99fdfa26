#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wavecast/error.hpp"
#include "wavecast/tensor.hpp"

namespace wavecast::ckpt {

WAVECAST_DEFINE_ERROR(CheckpointError);

struct NamedTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

// Binary container: magic + JSON header (caller metadata plus a tensor
// shape table) + raw row-major 64-bit values. Values round-trip bit-exactly.
// Files are written to a temp path and renamed into place, so a crash never
// leaves a truncated checkpoint behind.
void save_checkpoint(
    const std::string& path, const nlohmann::json& meta,
    const std::vector<std::pair<std::string, ad::Tensor>>& tensors);

struct Checkpoint {
  nlohmann::json meta;
  std::vector<NamedTensor> tensors;

  const NamedTensor& find(const std::string& name) const;
};

Checkpoint load_checkpoint(const std::string& path);

// Writes text to path atomically (temp file + rename).
void atomic_write_text(const std::string& path, const std::string& text);

}  // namespace wavecast::ckpt
