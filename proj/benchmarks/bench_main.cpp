#include <benchmark/benchmark.h>

#include "roadgraph/extraction.hpp"
#include "roadgraph/layers.hpp"
#include "roadgraph/model.hpp"
#include "roadgraph/ops.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/training.hpp"

using namespace roadgraph;

namespace {

std::vector<ObjectState> random_objects(Rng& rng, int n) {
  std::vector<ObjectState> objs;
  for (int i = 0; i < n; ++i) {
    ObjectState o;
    o.id = "obj_" + std::to_string(i);
    o.actor_type = i % 5 == 4 ? "pedestrian" : "car";
    o.position = {rng.uniform(-40, 40), rng.uniform(-40, 40), 0};
    o.yaw = rng.uniform(-180, 180);
    objs.push_back(o);
  }
  return objs;
}

const SceneGraphDataset& corpus() {
  static const SceneGraphDataset d = [] {
    SynthConfig sc;
    sc.clips = 8;
    return extract_dataset(synthesize(sc, 1), ExtractionConfig::defaults());
  }();
  return d;
}

void BM_ExtractGraph(benchmark::State& state) {
  Rng rng(1);
  const auto objs = random_objects(rng, static_cast<int>(state.range(0)));
  const auto cfg = ExtractionConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(extract_graph(objs, 0, cfg));
}
BENCHMARK(BM_ExtractGraph)->Arg(5)->Arg(10)->Arg(40);

void BM_MrgcnForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t rels = 15;
  TypedEdgeList edges(rels);
  for (std::size_t r = 0; r < rels; ++r) {
    for (std::size_t i = 0; i < n; ++i) edges.add(r, i, rng.uniform_index(n));
  }
  auto x = ad::glorot_init(n, 64, rng);
  const auto g = make_graph_input(x, std::move(edges));
  const auto p = layers::MrgcnParams::init(64, 64, rels, rng);
  for (auto _ : state) {
    ad::Tape tape;
    ad::Tensor loss;
    {
      ad::Tape::Recording rec(tape);
      loss = ad::sum(ad::sum(layers::mrgcn_layer(x, g, p), 0), 1);
    }
    ad::backward(tape, loss);
    benchmark::DoNotOptimize(p.w_self.grad());
  }
}
BENCHMARK(BM_MrgcnForwardBackward)->Arg(8)->Arg(32);

void BM_SequenceForward(benchmark::State& state) {
  const GraphModel model(ModelConfig{}, Vocabulary::of(corpus().config));
  const auto frames = model.prepare(corpus().clips[0]);
  for (auto _ : state) benchmark::DoNotOptimize(model.seq_forward(frames).prob_risky);
}
BENCHMARK(BM_SequenceForward);

void BM_TrainEpoch(benchmark::State& state) {
  TrainRun run;
  run.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_classifier(corpus(), run).loss_trace);
  state.counters["clips"] = static_cast<double>(corpus().clips.size());
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
