#include "roadgraph/explain.hpp"

#include <cstdio>

#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

AttentionDump explain(const GraphModel& model, const SceneGraphDataset& data) {
  if (model.config().task != TaskKind::kSequence) {
    raise(ErrorCode::kConfigError, "explain needs a sequence model");
  }
  require_same_vocabulary(model.vocabulary(), Vocabulary::of(data.config));
  AttentionDump dump;
  if (model.config().pool == PoolKind::kNone) dump.warnings.push_back("model has no pooling layer; alpha omitted");
  if (model.config().temporal != TemporalKind::kLstmAttn) {
    dump.warnings.push_back("model temporal readout is not lstm_attn; beta omitted");
  }
  for (const auto& clip : data.clips) {
    const auto out = model.seq_forward(model.prepare(clip));
    ClipAttention ca{clip.clip_id, clip.label, out.prediction, out.prob_risky, {}};
    for (std::size_t t = 0; t < clip.graphs.size(); ++t) {
      FrameAttention fa;
      fa.frame_index = clip.graphs[t].frame_index;
      for (const auto& node : clip.graphs[t].nodes) fa.node_labels.push_back(node.label);
      fa.alpha = out.alpha[t];
      if (out.beta) fa.beta = (*out.beta)[t];
      ca.frames.push_back(std::move(fa));
    }
    dump.clips.push_back(std::move(ca));
  }
  return dump;
}

std::string attention_csv(const AttentionDump& dump) {
  std::string out = "clip_id,frame_index,node_label,alpha,beta,prediction,label\n";
  for (const auto& clip : dump.clips) {
    const std::string tail = "," + std::to_string(clip.prediction) + "," +
                             (clip.label ? std::to_string(*clip.label) : std::string()) + "\n";
    for (const auto& frame : clip.frames) {
      const std::string beta = frame.beta ? format_number(*frame.beta) : std::string();
      for (std::size_t i = 0; i < frame.node_labels.size(); ++i) {
        out += csv_field(clip.clip_id) + "," + std::to_string(frame.frame_index) + "," +
               csv_field(frame.node_labels[i]) + "," + (frame.alpha ? format_number((*frame.alpha)[i]) : "") +
               "," + beta + tail;
      }
    }
  }
  return out;
}

}  // namespace roadgraph
