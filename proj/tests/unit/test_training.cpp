#include <gtest/gtest.h>

#include "roadgraph/error.hpp"
#include "roadgraph/extraction.hpp"
#include "roadgraph/ops.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/training.hpp"

using namespace roadgraph;

namespace {

const SceneGraphDataset& corpus() {
  static const SceneGraphDataset d = [] {
    SynthConfig sc;
    sc.clips = 16;
    return extract_dataset(synthesize(sc, 5), ExtractionConfig::defaults());
  }();
  return d;
}

TrainRun small_run() {
  TrainRun run;
  run.model.layer_sizes = {8, 8};
  run.model.lstm_hidden = 6;
  run.model.mlp_sizes = {6};
  run.epochs = 3;
  run.folds = 2;
  run.set_seed(7);
  return run;
}

std::vector<std::vector<double>> snapshot(const GraphModel& m) {
  std::vector<std::vector<double>> out;
  for (const auto& p : m.parameters()) out.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  return out;
}

}  // namespace

TEST(Training, ZeroLearningRateKeepsParameters) {
  for (auto task : {TaskKind::kSequence, TaskKind::kPerFrame}) {
    auto run = small_run();
    run.epochs = 1;
    run.learning_rate = 0.0;
    run.model.task = task;
    if (task == TaskKind::kPerFrame) run.model.temporal = TemporalKind::kLstmLast;
    const GraphModel fresh(run.model, Vocabulary::of(corpus().config));
    const auto trained = train_classifier(corpus(), run).model;
    EXPECT_EQ(snapshot(trained), snapshot(fresh));
  }
}

TEST(Training, DeterministicCheckpoints) {
  const auto a = train_classifier(corpus(), small_run());
  const auto b = train_classifier(corpus(), small_run());
  EXPECT_EQ(a.model.checkpoint_text(), b.model.checkpoint_text());
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  auto other = small_run();
  other.set_seed(8);
  EXPECT_NE(train_classifier(corpus(), other).model.checkpoint_text(), a.model.checkpoint_text());
}

TEST(Training, LossDecreases) {
  auto run = small_run();
  run.epochs = 6;
  const auto r = train_classifier(corpus(), run);
  ASSERT_EQ(r.loss_trace.size(), 6u);
  EXPECT_LT(r.loss_trace.back(), r.loss_trace.front());
}

TEST(Training, FrameTargetsBroadcast) {
  // The per-frame loss of a clip equals the mean frame cross-entropy against
  // the clip label, so one epoch with lr 0 reports exactly that.
  auto run = small_run();
  run.model.task = TaskKind::kPerFrame;
  run.model.temporal = TemporalKind::kLstmLast;
  run.model.dropout = 0.0;
  run.learning_rate = 0.0;
  run.epochs = 1;
  run.imbalance = Imbalance::kNone;
  const auto one = corpus().subset({0});
  const auto r = train_classifier(one, run);
  const auto out = r.model.frame_forward(r.model.prepare(one.clips[0]));
  const std::vector<int> targets(out.logits.rows(), *one.clips[0].label);
  EXPECT_DOUBLE_EQ(r.loss_trace[0], ad::cross_entropy(out.logits, targets).item());
}

TEST(Training, WrongTaskAndLabels) {
  auto run = small_run();
  EXPECT_THROW(train_frame_classifier(corpus(), run), Error);
  auto bad = corpus();
  bad.clips[0].label = 2;
  try {
    train_classifier(bad, run);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLabelError);
  }
}

TEST(Evaluation, PureAndCrossValidated) {
  const auto model = train_classifier(corpus(), small_run()).model;
  EXPECT_EQ(evaluate(model, corpus()), evaluate(model, corpus()));
  MetricsLog log;
  const auto cv = cross_validate(corpus(), small_run(), &log);
  EXPECT_EQ(cv.mean.per_fold.size(), 2u);
  EXPECT_EQ(cv.loss_traces.size(), 2u);
  EXPECT_EQ(log.lines().size(), 2u * 3u);
  auto run = small_run();
  run.folds = 1;
  EXPECT_THROW(cross_validate(corpus(), run), Error);
}

TEST(Transfer, SelfTransferIdentity) {
  const auto run = small_run();
  const auto split = transfer_split(corpus(), run);
  const auto r = transfer_evaluate(corpus(), corpus().subset(split.test), run);
  EXPECT_EQ(r.target, r.source);
  EXPECT_EQ(r.delta, 0.0);
  EXPECT_EQ(r.source_test, split.test);
}

TEST(Transfer, VocabularyMismatch) {
  auto target = corpus();
  target.config.relation_names.push_back("Extra");
  try {
    transfer_evaluate(corpus(), target, small_run());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVocabularyMismatch);
  }
}

TEST(TrainRunConfig, JsonRoundTrip) {
  const auto run = small_run();
  const auto back = TrainRun::from_json_text(run.to_json_text());
  EXPECT_EQ(back.to_json_text(), run.to_json_text());
  EXPECT_EQ(back.model, run.model);
  EXPECT_THROW(TrainRun::from_json_text("{\"optimizer\": \"rmsprop\"}"), Error);
}
