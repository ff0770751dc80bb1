#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "roadgraph/optim.hpp"

namespace roadgraph::ad {

inline constexpr const char* kCheckpointFormat = "ckpt.v1";

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

// Flat JSON: {"format": "ckpt.v1", "model_config": {...}, "params": {name:
// {"shape": [r, c], "data": base64 of little-endian float64}}}.
std::string format_checkpoint(const ParameterList& params, const std::string& model_config_json);

struct CheckpointContents {
  std::string model_config_json;
  std::vector<std::string> names;
  std::vector<Tensor> tensors;
};
CheckpointContents parse_checkpoint(const std::string& text);

// Copies stored values into `params` by name; names and shapes must match.
void load_checkpoint_values(const CheckpointContents& contents, const ParameterList& params);

}  // namespace roadgraph::ad
