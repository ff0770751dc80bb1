#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "roadgraph/metrics.hpp"
#include "roadgraph/model.hpp"
#include "roadgraph/optim.hpp"
#include "roadgraph/scenegraph.hpp"

namespace roadgraph {

enum class Imbalance { kClassWeights, kDownsample, kNone };

// Learning configuration. JSON keys: model (ModelConfig object), epochs,
// learning_rate, optimizer ("adam" | "sgd"), seed, imbalance
// ("class_weights" | "downsample" | "none"), folds, train_ratio.
struct TrainRun {
  ModelConfig model;
  int epochs = 20;
  double learning_rate = 2e-3;
  ad::OptimizerKind optimizer = ad::OptimizerKind::kAdam;
  std::uint64_t seed = 0;
  Imbalance imbalance = Imbalance::kClassWeights;
  int folds = 5;
  double train_ratio = 0.8;  // source split for transfer runs

  static TrainRun from_json_text(const std::string& text);
  static TrainRun load(const std::filesystem::path& path);
  std::string to_json_text() const;
  void validate() const;  // ConfigError

  // Sets the run seed and the model initialisation seed together.
  void set_seed(std::uint64_t s) {
    seed = s;
    model.seed = s;
  }
};

struct TrainResult {
  GraphModel model;
  std::vector<double> loss_trace;  // mean loss per epoch
};

// Called after each epoch with the 1-based epoch number.
using EpochCallback = std::function<void(int epoch, double mean_loss, const GraphModel& model)>;

// Dispatches on run.model.task.
TrainResult train_classifier(const SceneGraphDataset& train, const TrainRun& run,
                             const EpochCallback& on_epoch = {});
// Both require the matching task and throw ConfigError otherwise.
TrainResult train_sequence_classifier(const SceneGraphDataset& train, const TrainRun& run,
                                      const EpochCallback& on_epoch = {});
TrainResult train_frame_classifier(const SceneGraphDataset& train, const TrainRun& run,
                                   const EpochCallback& on_epoch = {});

// Per-unit outputs of an evaluation: clips for sequence models, frames
// (clip-major) for per-frame models.
struct Predictions {
  std::vector<int> labels;
  std::vector<int> predictions;
  std::vector<double> prob_risky;
};

Predictions predict(const GraphModel& model, const SceneGraphDataset& data);
Scores evaluate(const GraphModel& model, const SceneGraphDataset& data);

// One metrics.jsonl record per (run, fold, epoch).
class MetricsLog {
 public:
  void add(const std::string& run, int fold, int epoch, double loss, const Scores* test);
  const std::vector<std::string>& lines() const { return lines_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> lines_;
};

struct CrossValidation {
  Scores mean;
  std::vector<std::vector<double>> loss_traces;
};

// Stratified k-fold; each fold trains a fresh model from the run's seed.
// With `log`, every epoch is scored on that fold's test clips.
CrossValidation cross_validate(const SceneGraphDataset& data, const TrainRun& run,
                               MetricsLog* log = nullptr, const std::string& run_name = "cv");

struct TransferResult {
  Scores source;  // held-out source split
  Scores target;  // full target set, frozen weights
  double delta = 0.0;  // target accuracy - source accuracy
  std::vector<std::size_t> source_test;  // indices of the held-out source clips
};

// The stratified source split used by transfer_evaluate.
IndexSplit transfer_split(const SceneGraphDataset& source, const TrainRun& run);

// Throws VocabularyMismatch when the datasets' vocabularies differ.
TransferResult transfer_evaluate(const SceneGraphDataset& source, const SceneGraphDataset& target,
                                 const TrainRun& run, GraphModel* trained = nullptr);

// results.json text: an object keyed by run name; values are JSON texts.
std::string results_json(const std::vector<std::pair<std::string, std::string>>& entries);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace roadgraph
