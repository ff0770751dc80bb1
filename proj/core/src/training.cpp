#include "roadgraph/training.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "roadgraph/dataset.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/ops.hpp"

namespace roadgraph {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kDropoutStream = 2;
constexpr std::uint64_t kDownsampleStream = 3;
constexpr std::uint64_t kFoldStream = 4;
constexpr std::uint64_t kSplitStream = 5;

std::vector<int> binary_labels(const SceneGraphDataset& data) {
  auto labels = data.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      raise(ErrorCode::kLabelError, "clip '" + data.clips[i].clip_id + "' has non-binary label " +
                                        std::to_string(labels[i]));
    }
  }
  return labels;
}

TrainResult train_impl(const SceneGraphDataset& train_in, const TrainRun& run, const EpochCallback& on_epoch) {
  run.validate();
  if (train_in.clips.empty()) raise(ErrorCode::kEmptyDataset, "training set is empty");
  binary_labels(train_in);

  SceneGraphDataset subset_storage;
  const SceneGraphDataset* train = &train_in;
  if (run.imbalance == Imbalance::kDownsample) {
    subset_storage = train_in.subset(downsample_indices(train_in.labels(), derive_seed(run.seed, kDownsampleStream)));
    train = &subset_storage;
  }
  const auto labels = train->labels();
  std::pair<double, double> weights{1.0, 1.0};
  if (run.imbalance == Imbalance::kClassWeights) weights = class_weights(labels);

  GraphModel model(run.model, Vocabulary::of(train->config));
  const bool per_frame = run.model.task == TaskKind::kPerFrame;
  std::vector<std::vector<GraphInput>> inputs;
  inputs.reserve(train->clips.size());
  for (const auto& clip : train->clips) {
    if (clip.graphs.empty()) raise(ErrorCode::kEmptyClip, "clip '" + clip.clip_id + "' has no graphs");
    inputs.push_back(model.prepare(clip));
  }

  const auto params = model.parameters();
  ad::Optimizer optimizer(run.optimizer, run.learning_rate);
  Rng shuffle_rng(derive_seed(run.seed, kShuffleStream));
  Rng dropout_rng(derive_seed(run.seed, kDropoutStream));
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result{model, {}};
  for (int epoch = 1; epoch <= run.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (auto idx : order) {
      ad::Tape tape;
      ad::Tensor loss;
      {
        ad::Tape::Recording recording(tape);
        if (per_frame) {
          auto out = model.frame_forward(inputs[idx], &dropout_rng);
          loss = ad::cross_entropy(out.logits, std::vector<int>(inputs[idx].size(), labels[idx]), weights);
        } else {
          auto out = model.seq_forward(inputs[idx], &dropout_rng);
          loss = ad::cross_entropy(out.logits, {labels[idx]}, weights);
        }
      }
      total += loss.item();
      ad::backward(tape, loss);
      optimizer.step(params);
    }
    const double mean_loss = total / static_cast<double>(order.size());
    result.loss_trace.push_back(mean_loss);
    if (on_epoch) on_epoch(epoch, mean_loss, model);
  }
  return result;
}

}  // namespace

TrainRun TrainRun::from_json_text(const std::string& text) {
  TrainRun run;
  try {
    const auto j = json::parse(text);
    if (!j.is_object()) raise(ErrorCode::kConfigError, "learning config must be a JSON object");
    if (j.contains("model")) run.model = ModelConfig::from_json_text(j["model"].dump());
    if (j.contains("epochs")) run.epochs = j["epochs"].get<int>();
    if (j.contains("learning_rate")) run.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("optimizer")) {
      const auto name = j["optimizer"].get<std::string>();
      if (name == "adam") {
        run.optimizer = ad::OptimizerKind::kAdam;
      } else if (name == "sgd") {
        run.optimizer = ad::OptimizerKind::kSgd;
      } else {
        raise(ErrorCode::kConfigError, "optimizer must be 'adam' or 'sgd', got '" + name + "'");
      }
    }
    if (j.contains("seed")) run.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("imbalance")) {
      const auto name = j["imbalance"].get<std::string>();
      if (name == "class_weights") {
        run.imbalance = Imbalance::kClassWeights;
      } else if (name == "downsample") {
        run.imbalance = Imbalance::kDownsample;
      } else if (name == "none") {
        run.imbalance = Imbalance::kNone;
      } else {
        raise(ErrorCode::kConfigError, "imbalance must be class_weights, downsample or none, got '" + name + "'");
      }
    }
    if (j.contains("folds")) run.folds = j["folds"].get<int>();
    if (j.contains("train_ratio")) run.train_ratio = j["train_ratio"].get<double>();
  } catch (const json::exception& e) {
    raise(ErrorCode::kConfigError, std::string("learning config: ") + e.what());
  }
  run.validate();
  return run;
}

TrainRun TrainRun::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kNotFound, "learning config not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string TrainRun::to_json_text() const {
  ordered_json j;
  j["model"] = ordered_json::parse(model.to_json_text());
  j["epochs"] = epochs;
  j["learning_rate"] = learning_rate;
  j["optimizer"] = optimizer == ad::OptimizerKind::kAdam ? "adam" : "sgd";
  j["seed"] = seed;
  j["imbalance"] = imbalance == Imbalance::kClassWeights ? "class_weights"
                   : imbalance == Imbalance::kDownsample ? "downsample"
                                                         : "none";
  j["folds"] = folds;
  j["train_ratio"] = train_ratio;
  return j.dump(2);
}

void TrainRun::validate() const {
  model.validate();
  if (epochs < 1) raise(ErrorCode::kConfigError, "epochs must be >= 1");
  if (!(learning_rate >= 0.0)) raise(ErrorCode::kConfigError, "learning_rate must be >= 0");
  if (folds < 2) raise(ErrorCode::kConfigError, "folds must be >= 2");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) raise(ErrorCode::kConfigError, "train_ratio must lie in (0, 1)");
}

TrainResult train_classifier(const SceneGraphDataset& train, const TrainRun& run, const EpochCallback& on_epoch) {
  return train_impl(train, run, on_epoch);
}

TrainResult train_sequence_classifier(const SceneGraphDataset& train, const TrainRun& run,
                                      const EpochCallback& on_epoch) {
  if (run.model.task != TaskKind::kSequence) raise(ErrorCode::kConfigError, "model task is not 'sequence'");
  return train_impl(train, run, on_epoch);
}

TrainResult train_frame_classifier(const SceneGraphDataset& train, const TrainRun& run,
                                   const EpochCallback& on_epoch) {
  if (run.model.task != TaskKind::kPerFrame) raise(ErrorCode::kConfigError, "model task is not 'per_frame'");
  return train_impl(train, run, on_epoch);
}

Predictions predict(const GraphModel& model, const SceneGraphDataset& data) {
  if (data.clips.empty()) raise(ErrorCode::kEmptyDataset, "evaluation set is empty");
  require_same_vocabulary(model.vocabulary(), Vocabulary::of(data.config));
  const auto labels = binary_labels(data);
  Predictions out;
  for (std::size_t i = 0; i < data.clips.size(); ++i) {
    const auto inputs = model.prepare(data.clips[i]);
    if (model.config().task == TaskKind::kSequence) {
      const auto r = model.seq_forward(inputs);
      out.labels.push_back(labels[i]);
      out.predictions.push_back(r.prediction);
      out.prob_risky.push_back(r.prob_risky);
    } else {
      const auto r = model.frame_forward(inputs);
      for (std::size_t t = 0; t < inputs.size(); ++t) {
        out.labels.push_back(labels[i]);
        out.predictions.push_back(r.predictions[t]);
        out.prob_risky.push_back(r.prob_risky[t]);
      }
    }
  }
  return out;
}

Scores evaluate(const GraphModel& model, const SceneGraphDataset& data) {
  const auto p = predict(model, data);
  return score(p.predictions, p.prob_risky, p.labels);
}

void MetricsLog::add(const std::string& run, int fold, int epoch, double loss, const Scores* test) {
  ordered_json j;
  j["run"] = run;
  j["fold"] = fold;
  j["epoch"] = epoch;
  j["loss"] = loss;
  if (test != nullptr) j["test"] = ordered_json::parse(scores_to_json(*test, false));
  lines_.push_back(j.dump());
}

void MetricsLog::write(const std::filesystem::path& path) const {
  std::string text;
  for (const auto& line : lines_) text += line + "\n";
  write_text_file(path, text);
}

CrossValidation cross_validate(const SceneGraphDataset& data, const TrainRun& run, MetricsLog* log,
                               const std::string& run_name) {
  run.validate();
  const auto labels = binary_labels(data);
  const auto folds = kfold_assignments(labels, run.folds, derive_seed(run.seed, kFoldStream));
  CrossValidation cv;
  std::vector<Scores> fold_scores;
  for (int f = 0; f < run.folds; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test_idx : train_idx).push_back(i);
    const auto train = data.subset(train_idx);
    const auto test = data.subset(test_idx);
    EpochCallback cb;
    if (log != nullptr) {
      cb = [&](int epoch, double loss, const GraphModel& model) {
        const auto s = evaluate(model, test);
        log->add(run_name, f, epoch, loss, &s);
      };
    }
    auto result = train_impl(train, run, cb);
    fold_scores.push_back(evaluate(result.model, test));
    cv.loss_traces.push_back(std::move(result.loss_trace));
  }
  cv.mean = average_folds(fold_scores);
  return cv;
}

IndexSplit transfer_split(const SceneGraphDataset& source, const TrainRun& run) {
  return stratified_indices(binary_labels(source), run.train_ratio, derive_seed(run.seed, kSplitStream));
}

TransferResult transfer_evaluate(const SceneGraphDataset& source, const SceneGraphDataset& target,
                                 const TrainRun& run, GraphModel* trained) {
  require_same_vocabulary(Vocabulary::of(source.config), Vocabulary::of(target.config));
  const auto split = transfer_split(source, run);
  auto result = train_impl(source.subset(split.train), run, {});
  TransferResult out;
  out.source = evaluate(result.model, source.subset(split.test));
  out.target = evaluate(result.model, target);
  out.delta = out.target.accuracy - out.source.accuracy;
  out.source_test = split.test;
  if (trained != nullptr) *trained = result.model;
  return out;
}

std::string results_json(const std::vector<std::pair<std::string, std::string>>& entries) {
  ordered_json j = ordered_json::object();
  for (const auto& [name, text] : entries) j[name] = ordered_json::parse(text);
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) raise(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace roadgraph
