#include "roadgraph/model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "roadgraph/checkpoint.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/ops.hpp"

namespace roadgraph {

using nlohmann::json;

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& key, const std::string& text,
                const std::array<std::pair<const char*, Enum>, N>& table) {
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : table) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  raise(ErrorCode::kConfigError, "model config '" + key + "': unknown value '" + text + "' (expected " + allowed + ")");
}

constexpr std::array<std::pair<const char*, ConvKind>, 2> kConvNames{{{"mrgcn", ConvKind::kMrgcn},
                                                                      {"mrgin", ConvKind::kMrgin}}};
constexpr std::array<std::pair<const char*, PoolKind>, 3> kPoolNames{
    {{"sagpool", PoolKind::kSagpool}, {"topk", PoolKind::kTopk}, {"none", PoolKind::kNone}}};
constexpr std::array<std::pair<const char*, layers::ReadoutKind>, 3> kReadoutNames{
    {{"max", layers::ReadoutKind::kMax}, {"mean", layers::ReadoutKind::kMean}, {"add", layers::ReadoutKind::kAdd}}};
constexpr std::array<std::pair<const char*, TemporalKind>, 4> kTemporalNames{{{"lstm_last", TemporalKind::kLstmLast},
                                                                              {"lstm_sum", TemporalKind::kLstmSum},
                                                                              {"lstm_attn", TemporalKind::kLstmAttn},
                                                                              {"none", TemporalKind::kNone}}};
constexpr std::array<std::pair<const char*, TaskKind>, 2> kTaskNames{{{"sequence", TaskKind::kSequence},
                                                                      {"per_frame", TaskKind::kPerFrame}}};

template <typename Enum, std::size_t N>
std::string enum_name(Enum value, const std::array<std::pair<const char*, Enum>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  try {
    if (!j.is_object()) raise(ErrorCode::kConfigError, "model config must be a JSON object");
    if (j.contains("conv_kind")) c.conv_kind = parse_enum("conv_kind", j["conv_kind"].get<std::string>(), kConvNames);
    if (j.contains("layer_sizes")) c.layer_sizes = j["layer_sizes"].get<std::vector<std::size_t>>();
    if (j.contains("pool")) c.pool = parse_enum("pool", j["pool"].get<std::string>(), kPoolNames);
    if (j.contains("pool_ratio")) c.pool_ratio = j["pool_ratio"].get<double>();
    if (j.contains("readout")) c.readout = parse_enum("readout", j["readout"].get<std::string>(), kReadoutNames);
    if (j.contains("temporal")) c.temporal = parse_enum("temporal", j["temporal"].get<std::string>(), kTemporalNames);
    if (j.contains("lstm_hidden")) c.lstm_hidden = j["lstm_hidden"].get<std::size_t>();
    if (j.contains("mlp_sizes")) c.mlp_sizes = j["mlp_sizes"].get<std::vector<std::size_t>>();
    if (j.contains("task")) c.task = parse_enum("task", j["task"].get<std::string>(), kTaskNames);
    if (j.contains("dropout")) c.dropout = j["dropout"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("append_attributes")) c.append_attributes = j["append_attributes"].get<bool>();
  } catch (const json::exception& e) {
    raise(ErrorCode::kConfigError, std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ModelConfig& c) {
  return json{{"conv_kind", to_string(c.conv_kind)},
              {"layer_sizes", c.layer_sizes},
              {"pool", to_string(c.pool)},
              {"pool_ratio", c.pool_ratio},
              {"readout", to_string(c.readout)},
              {"temporal", to_string(c.temporal)},
              {"lstm_hidden", c.lstm_hidden},
              {"mlp_sizes", c.mlp_sizes},
              {"task", to_string(c.task)},
              {"dropout", c.dropout},
              {"seed", c.seed},
              {"append_attributes", c.append_attributes}};
}

}  // namespace

std::string to_string(ConvKind kind) { return enum_name(kind, kConvNames); }
std::string to_string(PoolKind kind) { return enum_name(kind, kPoolNames); }
std::string to_string(layers::ReadoutKind kind) { return enum_name(kind, kReadoutNames); }
std::string to_string(TemporalKind kind) { return enum_name(kind, kTemporalNames); }
std::string to_string(TaskKind kind) { return enum_name(kind, kTaskNames); }

ModelConfig ModelConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(ErrorCode::kConfigError, std::string("model config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ModelConfig ModelConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kNotFound, "model config not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string ModelConfig::to_json_text() const { return config_to_json(*this).dump(2); }

void ModelConfig::validate() const {
  if (layer_sizes.empty()) raise(ErrorCode::kConfigError, "layer_sizes needs at least one conv layer");
  for (auto s : layer_sizes) {
    if (s == 0) raise(ErrorCode::kConfigError, "layer_sizes entries must be positive");
  }
  for (auto s : mlp_sizes) {
    if (s == 0) raise(ErrorCode::kConfigError, "mlp_sizes entries must be positive");
  }
  if (pool != PoolKind::kNone && !(pool_ratio > 0.0 && pool_ratio <= 1.0)) {
    raise(ErrorCode::kConfigError, "pool_ratio must lie in (0, 1]");
  }
  if (temporal != TemporalKind::kNone && lstm_hidden == 0) {
    raise(ErrorCode::kConfigError, "lstm_hidden must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) raise(ErrorCode::kConfigError, "dropout must lie in [0, 1)");
  if (task == TaskKind::kPerFrame && temporal != TemporalKind::kLstmLast && temporal != TemporalKind::kNone) {
    raise(ErrorCode::kConfigError, "per_frame task needs temporal lstm_last or none, got " + to_string(temporal));
  }
}

void require_same_vocabulary(const Vocabulary& expected, const Vocabulary& actual) {
  auto compare = [](const std::vector<std::string>& a, const std::vector<std::string>& b, const char* what) {
    if (a == b) return;
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    std::string detail = i < a.size() && i < b.size() ? "'" + a[i] + "' vs '" + b[i] + "'"
                         : i < a.size()               ? "missing '" + a[i] + "'"
                                                      : "extra '" + b[i] + "'";
    raise(ErrorCode::kVocabularyMismatch, std::string(what) + " differ at position " + std::to_string(i) + ": " + detail);
  };
  compare(expected.actor_names, actual.actor_names, "actor_names");
  compare(expected.relation_names, actual.relation_names, "relation_names");
}

int predict_label(double logit0, double logit1) { return logit1 >= logit0 ? 1 : 0; }

GraphModel::GraphModel(ModelConfig config, Vocabulary vocabulary)
    : config_(std::move(config)), vocabulary_(std::move(vocabulary)), feature_cfg_(ExtractionConfig::defaults()) {
  config_.validate();
  if (vocabulary_.actor_names.empty()) raise(ErrorCode::kConfigError, "model vocabulary has no actor names");
  feature_cfg_.actor_names = vocabulary_.actor_names;
  feature_cfg_.relation_names = vocabulary_.relation_names;

  Rng rng(derive_seed(config_.seed, 0x6d6f64656cULL));
  const std::size_t relations = vocabulary_.relation_names.size();
  std::size_t width = feature_width(feature_cfg_, config_.append_attributes);
  for (auto size : config_.layer_sizes) {
    if (config_.conv_kind == ConvKind::kMrgcn) {
      gcn_.push_back(layers::MrgcnParams::init(width, size, relations, rng));
    } else {
      gin_.push_back(layers::MrginParams::init(width, size, relations, rng));
    }
    width = size;
  }
  const std::size_t embed = embedding_width();
  if (config_.pool == PoolKind::kSagpool) sag_score_ = layers::MrgcnParams::init(embed, 1, relations, rng);
  if (config_.pool == PoolKind::kTopk) topk_projection_ = ad::glorot_init(embed, 1, rng);
  std::size_t head_in = embed;
  if (config_.temporal != TemporalKind::kNone) {
    lstm_ = layers::LstmParams::init(embed, config_.lstm_hidden, rng);
    head_in = config_.lstm_hidden;
  }
  if (config_.temporal == TemporalKind::kLstmAttn) {
    attention_ = layers::AttentionParams::init(config_.lstm_hidden, config_.lstm_hidden, rng);
  }
  head_ = layers::Mlp::init(head_in, config_.mlp_sizes, 2, rng);
}

std::size_t GraphModel::embedding_width() const {
  if (config_.conv_kind == ConvKind::kMrgcn) return config_.layer_sizes.back();
  std::size_t total = 0;
  for (auto s : config_.layer_sizes) total += s;
  return total;
}

ad::ParameterList GraphModel::parameters() const {
  ad::ParameterList out;
  for (std::size_t i = 0; i < gcn_.size(); ++i) gcn_[i].collect("conv." + std::to_string(i), out);
  for (std::size_t i = 0; i < gin_.size(); ++i) gin_[i].collect("conv." + std::to_string(i), out);
  if (sag_score_) sag_score_->collect("pool.score", out);
  if (topk_projection_) out.push_back({"pool.projection", *topk_projection_});
  if (lstm_) lstm_->collect("lstm", out);
  if (attention_) attention_->collect("attention", out);
  head_.collect("head", out);
  return out;
}

GraphInput GraphModel::prepare(const SceneGraph& graph) const {
  return featurize(graph, feature_cfg_, config_.append_attributes);
}

std::vector<GraphInput> GraphModel::prepare(const SceneGraphClip& clip) const {
  std::vector<GraphInput> out;
  out.reserve(clip.graphs.size());
  for (const auto& g : clip.graphs) out.push_back(prepare(g));
  return out;
}

SpatialOutput GraphModel::spatial(const GraphInput& graph, Rng* dropout_rng) const {
  ad::Tensor x = graph.features;
  std::vector<ad::Tensor> layer_outputs;
  const std::size_t depth = config_.layer_sizes.size();
  for (std::size_t i = 0; i < depth; ++i) {
    x = config_.conv_kind == ConvKind::kMrgcn ? layers::mrgcn_layer(x, graph, gcn_[i])
                                              : ad::relu(layers::mrgin_layer(x, graph, gin_[i]));
    x = layers::dropout(x, config_.dropout, dropout_rng);
    layer_outputs.push_back(x);
  }
  if (config_.conv_kind == ConvKind::kMrgin && depth > 1) x = ad::concat(layer_outputs, 1);

  SpatialOutput out;
  if (config_.pool == PoolKind::kNone || graph.node_count() == 0) {
    out.h = layers::readout(x, config_.readout);
    return out;
  }
  layers::PoolResult pooled;
  if (config_.pool == PoolKind::kSagpool) {
    GraphInput view{x, graph.edges, graph.adjacency};
    pooled = layers::sagpool(x, view, *sag_score_, config_.pool_ratio);
  } else {
    pooled = layers::topk_pool(x, graph.edges, *topk_projection_, config_.pool_ratio);
  }
  out.h = layers::readout(pooled.x, config_.readout);
  out.alpha = std::move(pooled.scores);
  return out;
}

SequenceOutput GraphModel::seq_forward(const std::vector<GraphInput>& graphs, Rng* dropout_rng) const {
  if (config_.task != TaskKind::kSequence) raise(ErrorCode::kConfigError, "seq_forward on a per_frame model");
  if (graphs.empty()) raise(ErrorCode::kEmptyClip, "sequence has no graphs");
  SequenceOutput out;
  std::vector<ad::Tensor> steps;
  steps.reserve(graphs.size());
  if (lstm_) {
    auto state = layers::lstm_zero_state(lstm_->hidden);
    for (const auto& g : graphs) {
      auto s = spatial(g, dropout_rng);
      out.alpha.push_back(std::move(s.alpha));
      state = layers::lstm_step(s.h, state, *lstm_);
      steps.push_back(state.p);
    }
  } else {
    for (const auto& g : graphs) {
      auto s = spatial(g, dropout_rng);
      out.alpha.push_back(std::move(s.alpha));
      steps.push_back(s.h);
    }
  }

  ad::Tensor z;
  switch (config_.temporal) {
    case TemporalKind::kLstmLast: z = steps.back(); break;
    case TemporalKind::kLstmSum: z = ad::sum(ad::concat(steps, 0), 0); break;
    case TemporalKind::kNone: z = ad::mean(ad::concat(steps, 0), 0); break;
    case TemporalKind::kLstmAttn: {
      auto attn = layers::temporal_attention(ad::concat(steps, 0), *attention_);
      z = attn.z;
      out.beta = std::vector<double>(attn.beta.data().begin(), attn.beta.data().end());
      break;
    }
  }
  out.logits = head_.forward(z);
  const auto probs = ad::softmax_row(out.logits, 0);
  out.prob_risky = probs[1];
  out.prediction = predict_label(out.logits.at(0, 0), out.logits.at(0, 1));
  return out;
}

FrameOutput GraphModel::frame_forward(const std::vector<GraphInput>& graphs, Rng* dropout_rng) const {
  if (config_.task != TaskKind::kPerFrame) raise(ErrorCode::kConfigError, "frame_forward on a sequence model");
  if (graphs.empty()) raise(ErrorCode::kEmptyClip, "sequence has no graphs");
  FrameOutput out;
  std::vector<ad::Tensor> steps;
  steps.reserve(graphs.size());
  std::optional<layers::LstmState> state;
  if (lstm_) state = layers::lstm_zero_state(lstm_->hidden);
  for (const auto& g : graphs) {
    auto s = spatial(g, dropout_rng);
    out.alpha.push_back(std::move(s.alpha));
    if (state) {
      state = layers::lstm_step(s.h, *state, *lstm_);
      steps.push_back(state->p);
    } else {
      steps.push_back(s.h);
    }
  }
  out.logits = head_.forward(ad::concat(steps, 0));
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    out.prob_risky.push_back(ad::softmax_row(out.logits, t)[1]);
    out.predictions.push_back(predict_label(out.logits.at(t, 0), out.logits.at(t, 1)));
  }
  return out;
}

std::string GraphModel::checkpoint_text() const {
  json meta = config_to_json(config_);
  meta["vocabulary"] = {{"actor_names", vocabulary_.actor_names}, {"relation_names", vocabulary_.relation_names}};
  return ad::format_checkpoint(parameters(), meta.dump());
}

void GraphModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIoError, "cannot write checkpoint: " + path.string());
  out << checkpoint_text();
  if (!out) raise(ErrorCode::kIoError, "failed writing checkpoint: " + path.string());
}

GraphModel GraphModel::from_checkpoint_text(const std::string& text) {
  const auto contents = ad::parse_checkpoint(text);
  json meta;
  Vocabulary vocab;
  try {
    meta = json::parse(contents.model_config_json);
    vocab.actor_names = meta.at("vocabulary").at("actor_names").get<std::vector<std::string>>();
    vocab.relation_names = meta.at("vocabulary").at("relation_names").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    raise(ErrorCode::kSchemaError, std::string("checkpoint model_config: ") + e.what());
  }
  meta.erase("vocabulary");
  GraphModel model(config_from_json(meta), std::move(vocab));
  ad::load_checkpoint_values(contents, model.parameters());
  return model;
}

GraphModel GraphModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kNotFound, "checkpoint not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_checkpoint_text(buffer.str());
}

}  // namespace roadgraph
