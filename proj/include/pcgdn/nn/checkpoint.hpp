#pragma once

#include <string>
#include <vector>

#include "pcgdn/nn/graph.hpp"
#include "pcgdn/nn/nadam.hpp"

namespace pcgdn::nn {

// Checkpoint file layout (all little-endian):
//   magic "PCGU" | version u32 | tensor count u32 | records...
// record: name_len u16 | name bytes | ndim u8 | dims u32 each | payload f32
// Optimizer state rides along in the same framing under the reserved
// "__opt__/" name prefix ("__opt__/m/<param>", "__opt__/v/<param>",
// "__opt__/step" as a single f32).
inline constexpr uint32_t kCheckpointVersion = 1;

struct TensorRecord {
    std::string name;
    std::vector<int> dims;
    std::vector<float> data;
};

void save_checkpoint(const std::string& path, const std::vector<TensorRecord>& tensors);
std::vector<TensorRecord> load_checkpoint(const std::string& path);

// Model-level helpers: save captures parameters + running stats (+ optimizer
// state when given); load restores them bit-exactly into a model whose
// architecture already matches.
void save_model_checkpoint(const std::string& path, Model& model,
                           const NadamState<float>* opt = nullptr);
void load_model_checkpoint(const std::string& path, Model& model,
                           NadamState<float>* opt = nullptr);

} // namespace pcgdn::nn
