#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roadgraph/extraction_config.hpp"
#include "roadgraph/featurize.hpp"
#include "roadgraph/layers.hpp"
#include "roadgraph/optim.hpp"
#include "roadgraph/scenegraph.hpp"

namespace roadgraph {

enum class ConvKind { kMrgcn, kMrgin };
enum class PoolKind { kSagpool, kTopk, kNone };
enum class TemporalKind { kLstmLast, kLstmSum, kLstmAttn, kNone };
enum class TaskKind { kSequence, kPerFrame };

struct ModelConfig {
  ConvKind conv_kind = ConvKind::kMrgcn;
  std::vector<std::size_t> layer_sizes{64, 64};
  PoolKind pool = PoolKind::kSagpool;
  double pool_ratio = 0.5;
  layers::ReadoutKind readout = layers::ReadoutKind::kAdd;
  TemporalKind temporal = TemporalKind::kLstmAttn;
  std::size_t lstm_hidden = 64;
  std::vector<std::size_t> mlp_sizes{64};
  TaskKind task = TaskKind::kSequence;
  double dropout = 0.1;
  std::uint64_t seed = 0;
  bool append_attributes = false;

  // Missing keys keep their defaults; unknown enum spellings throw ConfigError.
  static ModelConfig from_json_text(const std::string& text);
  static ModelConfig load(const std::filesystem::path& path);
  std::string to_json_text() const;
  void validate() const;  // ConfigError

  bool operator==(const ModelConfig&) const = default;
};

std::string to_string(ConvKind kind);
std::string to_string(PoolKind kind);
std::string to_string(layers::ReadoutKind kind);
std::string to_string(TemporalKind kind);
std::string to_string(TaskKind kind);

// Actor and relation vocabularies the model was built for.
struct Vocabulary {
  std::vector<std::string> actor_names;
  std::vector<std::string> relation_names;

  static Vocabulary of(const ExtractionConfig& cfg) { return {cfg.actor_names, cfg.relation_names}; }
  bool operator==(const Vocabulary&) const = default;
};

// Throws VocabularyMismatch naming the first difference.
void require_same_vocabulary(const Vocabulary& expected, const Vocabulary& actual);

struct SpatialOutput {
  ad::Tensor h;                        // 1 x embedding_width
  std::optional<std::vector<double>> alpha;  // per input node, when pooling
};

struct SequenceOutput {
  ad::Tensor logits;  // 1 x 2
  double prob_risky = 0.0;
  int prediction = 0;
  std::vector<std::optional<std::vector<double>>> alpha;  // per frame
  std::optional<std::vector<double>> beta;                // per frame, lstm_attn only
};

struct FrameOutput {
  ad::Tensor logits;  // T x 2
  std::vector<double> prob_risky;
  std::vector<int> predictions;
  std::vector<std::optional<std::vector<double>>> alpha;
};

// Argmax with ties resolved to 1.
int predict_label(double logit0, double logit1);

class GraphModel {
 public:
  GraphModel(ModelConfig config, Vocabulary vocabulary);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocabulary_; }
  std::size_t embedding_width() const;

  // Stable order; names are unique.
  ad::ParameterList parameters() const;

  GraphInput prepare(const SceneGraph& graph) const;
  std::vector<GraphInput> prepare(const SceneGraphClip& clip) const;

  // `dropout_rng` non-null means training mode.
  SpatialOutput spatial(const GraphInput& graph, Rng* dropout_rng = nullptr) const;
  SequenceOutput seq_forward(const std::vector<GraphInput>& graphs, Rng* dropout_rng = nullptr) const;
  FrameOutput frame_forward(const std::vector<GraphInput>& graphs, Rng* dropout_rng = nullptr) const;

  std::string checkpoint_text() const;
  void save(const std::filesystem::path& path) const;
  static GraphModel from_checkpoint_text(const std::string& text);
  static GraphModel load(const std::filesystem::path& path);

 private:
  ModelConfig config_;
  Vocabulary vocabulary_;
  ExtractionConfig feature_cfg_;
  std::vector<layers::MrgcnParams> gcn_;
  std::vector<layers::MrginParams> gin_;
  std::optional<layers::MrgcnParams> sag_score_;
  std::optional<ad::Tensor> topk_projection_;
  std::optional<layers::LstmParams> lstm_;
  std::optional<layers::AttentionParams> attention_;
  layers::Mlp head_;
};

}  // namespace roadgraph
