#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roadgraph/model.hpp"
#include "roadgraph/scenegraph.hpp"

namespace roadgraph {

struct FrameAttention {
  std::int64_t frame_index = 0;
  std::vector<std::string> node_labels;
  std::optional<std::vector<double>> alpha;  // one per node
  std::optional<double> beta;
};

struct ClipAttention {
  std::string clip_id;
  std::optional<int> label;
  int prediction = 0;
  double prob_risky = 0.0;
  std::vector<FrameAttention> frames;
};

struct AttentionDump {
  std::vector<ClipAttention> clips;
  std::vector<std::string> warnings;  // set when alpha or beta is unavailable
};

// Runs seq_forward per clip and records node (alpha) and frame (beta)
// attention. Models without pooling or lstm_attn produce a partial dump.
AttentionDump explain(const GraphModel& model, const SceneGraphDataset& data);

// Columns: clip_id,frame_index,node_label,alpha,beta,prediction,label. One
// row per node per frame; absent values are empty cells.
std::string attention_csv(const AttentionDump& dump);

}  // namespace roadgraph
