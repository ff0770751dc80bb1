// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "extraction_oracle.hpp"
#include "gradcheck.hpp"
#include "metric_oracles.hpp"
#include "roadgraph/bev.hpp"
#include "roadgraph/cli.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/explain.hpp"
#include "roadgraph/extraction.hpp"
#include "roadgraph/layers.hpp"
#include "roadgraph/metrics.hpp"
#include "roadgraph/ops.hpp"
#include "roadgraph/synth.hpp"
#include "roadgraph/training.hpp"

namespace fs = std::filesystem;
namespace ad = roadgraph::ad;
namespace layers = roadgraph::layers;
using roadgraph::Rng;
using roadgraph::SceneGraphDataset;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared synthetic corpus and the default learning run.
struct Corpus {
  SceneGraphDataset data;
  roadgraph::TrainRun run;
};

SceneGraphDataset extract_synth(const roadgraph::SynthConfig& cfg, std::uint64_t seed) {
  const auto raw = roadgraph::synthesize(cfg, seed);
  return roadgraph::extract_dataset(raw, roadgraph::ExtractionConfig::defaults());
}

std::vector<std::vector<roadgraph::ObjectState>> random_corpus() {
  Rng rng(20240601);
  std::vector<std::vector<roadgraph::ObjectState>> frames;
  for (int i = 0; i < 1000; ++i) frames.push_back(oracle::random_frame(rng, 10, 40.0));
  return frames;
}

// 1
Outcome extraction_oracle(const std::vector<std::vector<roadgraph::ObjectState>>& frames) {
  const auto cfg = roadgraph::ExtractionConfig::defaults();
  const auto t0 = Clock::now();
  std::size_t mismatches = 0, edges = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto graph = roadgraph::extract_graph(frames[f], static_cast<std::int64_t>(f), cfg).graph;
    std::vector<oracle::Edge> got;
    for (const auto& e : graph.edges) got.push_back({e.src, e.dst, e.relation});
    std::sort(got.begin(), got.end());
    const auto want = oracle::brute_force_edges(frames[f]);
    edges += want.size();
    if (got != want) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0, std::to_string(frames.size()) + " frames, " + std::to_string(edges) +
                                              " oracle edges, " + std::to_string(mismatches) +
                                              " mismatching frames, " + num(secs, 2) + " s (limit 10 s)"};
}

// 2
Outcome threshold_nesting(const std::vector<std::vector<roadgraph::ObjectState>>& frames) {
  const auto cfg = roadgraph::ExtractionConfig::defaults();
  std::size_t checked = 0, violations = 0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto graph = roadgraph::extract_graph(frames[f], static_cast<std::int64_t>(f), cfg).graph;
    std::set<std::tuple<int, int, std::string>> have;
    for (const auto& e : graph.edges) have.insert({e.src, e.dst, e.relation});
    for (const auto& e : graph.edges) {
      if (e.relation != "Near_Collision") continue;
      ++checked;
      for (const char* wider : {"Super_Near", "Very_Near", "Near", "Visible"}) {
        if (!have.count({e.src, e.dst, wider})) ++violations;
      }
    }
  }
  return {violations == 0 && checked > 0,
          std::to_string(checked) + " Near_Collision edges checked, " + std::to_string(violations) + " violations"};
}

// 3
Outcome homography() {
  Rng rng(7);
  double worst_residual = 0.0, worst_roundtrip = 0.0;
  for (int q = 0; q < 200; ++q) {
    const std::array<roadgraph::PixelPoint, 4> img{{{rng.uniform(0, 200), rng.uniform(400, 480)},
                                                    {rng.uniform(440, 640), rng.uniform(400, 480)},
                                                    {rng.uniform(340, 440), rng.uniform(200, 260)},
                                                    {rng.uniform(200, 300), rng.uniform(200, 260)}}};
    const double w = rng.uniform(12, 48), l = rng.uniform(30, 120);
    const std::array<roadgraph::GroundPoint, 4> ground{{{0, l}, {w, l}, {w, 0}, {0, 0}}};
    const auto h = roadgraph::fit_homography(img, ground);
    for (int k = 0; k < 4; ++k) {
      const double u = img[k].u, v = img[k].v;
      const double den = h[6] * u + h[7] * v + h[8];
      const double x = (h[0] * u + h[1] * v + h[2]) / den;
      const double y = (h[3] * u + h[4] * v + h[5]) / den;
      worst_residual = std::max(worst_residual, std::hypot(x - ground[k].x, y - ground[k].y));
    }
    const auto inv = roadgraph::invert_homography(h);
    for (int s = 0; s < 100; ++s) {
      const double a = rng.uniform(0.01, 0.99), b = rng.uniform(0.01, 0.99);
      // Bilinear blend of the corners stays inside the quadrilateral.
      const double u = (1 - a) * (1 - b) * img[0].u + a * (1 - b) * img[1].u + a * b * img[2].u + (1 - a) * b * img[3].u;
      const double v = (1 - a) * (1 - b) * img[0].v + a * (1 - b) * img[1].v + a * b * img[2].v + (1 - a) * b * img[3].v;
      const auto g = roadgraph::apply_homography(h, {u, v});
      const auto back = roadgraph::apply_homography(inv, {g.x, g.y});
      worst_roundtrip = std::max(worst_roundtrip, std::hypot(back.x - u, back.y - v));
    }
  }
  return {worst_residual < 1e-9 && worst_roundtrip < 1e-6,
          "max control residual " + sci(worst_residual) + " ft (limit 1e-9), max round-trip " + sci(worst_roundtrip) +
              " px (limit 1e-6)"};
}

// 4
roadgraph::GraphInput random_graph(std::size_t n, std::size_t f, std::size_t relations, Rng& rng, bool grad) {
  roadgraph::TypedEdgeList edges(relations);
  for (std::size_t r = 0; r < relations; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && rng.uniform() < 0.4) edges.add(r, i, j);
      }
    }
  }
  return roadgraph::make_graph_input(gradcheck::random_tensor(n, f, rng, grad), std::move(edges));
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  Rng rng(11);
  std::vector<std::pair<std::string, gradcheck::Result>> results;
  const double h = 1e-5;

  {
    auto g = random_graph(4, 3, 3, rng, true);
    auto p = layers::MrgcnParams::init(3, 5, 3, rng);
    for (auto& b : p.bias.mutable_data()) b = rng.uniform(-0.5, 0.5);
    ad::ParameterList params{{"x", g.features}};
    p.collect("mrgcn", params);
    const auto w = gradcheck::random_tensor(4, 5, rng, false);
    results.push_back({"mrgcn", gradcheck::check([&] { return gradcheck::contract(layers::mrgcn_layer(g.features, g, p), w); }, params, h)});
  }
  {
    auto g = random_graph(4, 3, 2, rng, true);
    auto p = layers::MrginParams::init(3, 4, 2, rng);
    p.eps.at(0, 0) = 0.3;
    ad::ParameterList params{{"x", g.features}};
    p.collect("mrgin", params);
    const auto w = gradcheck::random_tensor(4, 4, rng, false);
    results.push_back({"mrgin", gradcheck::check([&] { return gradcheck::contract(layers::mrgin_layer(g.features, g, p), w); }, params, h)});
  }
  {
    auto g = random_graph(5, 3, 2, rng, true);
    auto p = layers::MrgcnParams::init(3, 1, 2, rng);
    ad::ParameterList params{{"x", g.features}};
    p.collect("score", params);
    const auto w = gradcheck::random_tensor(3, 3, rng, false);
    results.push_back({"sagpool", gradcheck::check([&] { return gradcheck::contract(layers::sagpool(g.features, g, p, 0.5).x, w); }, params, h)});
  }
  {
    auto g = random_graph(5, 3, 1, rng, true);
    auto proj = gradcheck::random_tensor(3, 1, rng, true);
    ad::ParameterList params{{"x", g.features}, {"p", proj}};
    const auto w = gradcheck::random_tensor(3, 3, rng, false);
    results.push_back({"topk", gradcheck::check([&] { return gradcheck::contract(layers::topk_pool(g.features, g.edges, proj, 0.5).x, w); }, params, h)});
  }
  {
    auto lstm = layers::LstmParams::init(3, 4, rng);
    auto x = gradcheck::random_tensor(1, 3, rng, true);
    layers::LstmState prev{gradcheck::random_tensor(1, 4, rng, true), gradcheck::random_tensor(1, 4, rng, true)};
    ad::ParameterList params{{"x", x}, {"p_prev", prev.p}, {"c_prev", prev.c}};
    lstm.collect("lstm", params);
    const auto wp = gradcheck::random_tensor(1, 4, rng, false);
    const auto wc = gradcheck::random_tensor(1, 4, rng, false);
    results.push_back({"lstm_step", gradcheck::check([&] {
                         auto s = layers::lstm_step(x, prev, lstm);
                         return ad::add(gradcheck::contract(s.p, wp), gradcheck::contract(s.c, wc));
                       }, params, h)});
  }
  {
    auto attn = layers::AttentionParams::init(3, 4, rng);
    auto steps = gradcheck::random_tensor(5, 3, rng, true);
    ad::ParameterList params{{"P", steps}};
    attn.collect("attention", params);
    const auto w = gradcheck::random_tensor(1, 3, rng, false);
    results.push_back({"temporal_attention", gradcheck::check([&] { return gradcheck::contract(layers::temporal_attention(steps, attn).z, w); }, params, h)});
  }
  {
    auto mlp = layers::Mlp::init(3, {5, 4}, 2, rng);
    for (auto& l : mlp.layers) {
      for (auto& b : l.bias.mutable_data()) b = rng.uniform(-0.5, 0.5);
    }
    auto x = gradcheck::random_tensor(3, 3, rng, true);
    ad::ParameterList params{{"x", x}};
    mlp.collect("mlp", params);
    const auto w = gradcheck::random_tensor(3, 2, rng, false);
    results.push_back({"mlp", gradcheck::check([&] { return gradcheck::contract(mlp.forward(x), w); }, params, h)});
  }
  {
    auto logits = gradcheck::random_tensor(4, 2, rng, true, 3.0);
    ad::ParameterList params{{"logits", logits}};
    results.push_back({"cross_entropy", gradcheck::check([&] { return ad::cross_entropy(logits, {1, 0, 1, 1}, {0.625, 2.5}); }, params, h)});
  }
  {
    // Full composite: 3-node graphs, 2 frames, default pipeline shape.
    roadgraph::ModelConfig mc;
    mc.layer_sizes = {4, 4};
    mc.lstm_hidden = 3;
    mc.mlp_sizes = {4};
    mc.dropout = 0.0;
    mc.seed = 5;
    const auto vocab = roadgraph::Vocabulary::of(roadgraph::ExtractionConfig::defaults());
    roadgraph::GraphModel model(mc, vocab);
    for (auto& p : model.parameters()) {
      if (p.name.find("bias") != std::string::npos) {
        for (auto& b : p.tensor.mutable_data()) b = rng.uniform(-0.3, 0.3);
      }
    }
    std::vector<roadgraph::GraphInput> frames;
    for (int t = 0; t < 2; ++t) {
      roadgraph::TypedEdgeList edges(vocab.relation_names.size());
      edges.add(0, 1, 0);
      edges.add(3, 0, 2);
      edges.add(3, 2, 0);
      edges.add(static_cast<std::size_t>(9 + t), 1, 2);
      auto x = ad::Tensor::zeros(3, vocab.actor_names.size());
      x.at(0, 0) = 1;
      x.at(1, 0) = 1;
      x.at(2, 4) = 1;
      frames.push_back(roadgraph::make_graph_input(x, std::move(edges)));
    }
    results.push_back({"seq_forward", gradcheck::check([&] { return ad::cross_entropy(model.seq_forward(frames).logits, {1}); },
                                                       model.parameters(), h)});
  }

  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_name, listing;
  for (const auto& [name, r] : results) {
    listing += (listing.empty() ? "" : ", ") + name + " " + sci(r.max_rel_error);
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_name = name;
    }
  }
  return {worst < 1e-5 && secs < 30.0,
          "max rel err " + sci(worst) + " (" + worst_name + ", limit 1e-5), " + num(secs, 2) + " s; " + listing};
}

// 5
Outcome metric_oracles() {
  Rng rng(5);
  int auc_mismatch = 0;
  for (int inst = 0; inst < 200; ++inst) {
    std::vector<double> scores(100);
    std::vector<int> labels(100);
    for (int i = 0; i < 100; ++i) {
      // Coarse grid so ties are common.
      scores[i] = std::floor(rng.uniform() * 20.0) / 20.0;
      labels[i] = rng.uniform() < 0.4 ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    if (roadgraph::auc(scores, labels) != metric_oracle::pairwise_auc(scores, labels)) ++auc_mismatch;
  }
  int mcc_mismatch = 0;
  for (int inst = 0; inst < 200; ++inst) {
    roadgraph::Confusion c{static_cast<std::int64_t>(rng.uniform_index(50)), static_cast<std::int64_t>(rng.uniform_index(50)),
                           static_cast<std::int64_t>(rng.uniform_index(50)), static_cast<std::int64_t>(rng.uniform_index(50))};
    if (inst % 10 == 0) c.fp = 0, c.tp = 0;  // zero-factor convention
    if (roadgraph::mcc(c) != metric_oracle::direct_mcc(c.tp, c.tn, c.fp, c.fn)) ++mcc_mismatch;
  }
  std::vector<int> labels(100), constant(100, 1);
  std::vector<double> probs(100, 0.7);
  for (int i = 0; i < 100; ++i) labels[i] = i % 2;
  const auto s = roadgraph::score(constant, probs, labels);
  const bool constant_ok = s.accuracy == 0.5 && s.mcc == 0.0;
  return {auc_mismatch == 0 && mcc_mismatch == 0 && constant_ok,
          "AUC mismatches " + std::to_string(auc_mismatch) + "/200, MCC mismatches " + std::to_string(mcc_mismatch) +
              "/200, constant predictor accuracy " + num(s.accuracy) + " mcc " + num(s.mcc)};
}

// 6
Outcome learnability(const Corpus& corpus) {
  const auto t0 = Clock::now();
  const auto cv = roadgraph::cross_validate(corpus.data, corpus.run);
  const double secs = seconds_since(t0);
  const double auc = cv.mean.auc.value_or(0.0);
  return {cv.mean.accuracy >= 0.90 && auc >= 0.95 && secs < 300.0,
          std::to_string(corpus.run.folds) + "-fold mean accuracy " + num(cv.mean.accuracy) + " (>= 0.90), auc " +
              num(auc) + " (>= 0.95), " + std::to_string(corpus.run.epochs) + " epochs, " + num(secs, 1) +
              " s (limit 300 s)"};
}

// 7
Outcome collision_prediction(const Corpus& corpus) {
  auto run = corpus.run;
  run.model.task = roadgraph::TaskKind::kPerFrame;
  run.model.temporal = roadgraph::TemporalKind::kLstmLast;
  const auto labels = corpus.data.labels();
  const auto folds = roadgraph::kfold_assignments(labels, run.folds, run.seed);
  std::vector<roadgraph::Scores> fold_scores;
  double early_sum = 0.0, late_sum = 0.0;
  std::size_t risky = 0;
  for (int f = 0; f < run.folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? te : tr).push_back(i);
    const auto model = roadgraph::train_frame_classifier(corpus.data.subset(tr), run).model;
    const auto test = corpus.data.subset(te);
    fold_scores.push_back(roadgraph::evaluate(model, test));
    for (const auto& clip : test.clips) {
      if (clip.label != 1) continue;
      const auto out = model.frame_forward(model.prepare(clip));
      const auto& p = out.prob_risky;
      const std::size_t t = p.size();
      early_sum += (p[0] + p[1] + p[2]) / 3.0;
      late_sum += (p[t - 1] + p[t - 2] + p[t - 3]) / 3.0;
      ++risky;
    }
  }
  const auto mean = roadgraph::average_folds(fold_scores);
  const double gain = (late_sum - early_sum) / static_cast<double>(risky);
  return {mean.mcc >= 0.4 && gain >= 0.2, "frame-level mcc " + num(mean.mcc) + " (>= 0.4), risky-clip probability gain last3 - first3 " +
                                              num(gain) + " (>= 0.2) over " + std::to_string(risky) + " held-out risky clips"};
}

// 8
Outcome transfer(const Corpus& corpus) {
  const auto& run = corpus.run;
  const auto split = roadgraph::transfer_split(corpus.data, run);
  const auto self = roadgraph::transfer_evaluate(corpus.data, corpus.data.subset(split.test), run);
  const bool identity = self.target == self.source;

  roadgraph::SynthConfig shifted;
  shifted.name = "synth_shifted";
  shifted.lane_width *= 1.5;
  shifted.speed_scale *= 1.5;
  const auto target = extract_synth(shifted, 1);
  const auto cross = roadgraph::transfer_evaluate(corpus.data, target, run);

  auto shuffled = corpus.data;
  auto labels = shuffled.labels();
  Rng rng(99);
  rng.shuffle(std::span<int>(labels));
  for (std::size_t i = 0; i < labels.size(); ++i) shuffled.clips[i].label = labels[i];
  const auto control = roadgraph::transfer_evaluate(shuffled, target, run);

  return {identity && cross.target.accuracy >= 0.75 && control.target.accuracy <= 0.6,
          std::string("self-transfer identical ") + (identity ? "yes" : "no") + " (source-test acc " +
              num(self.source.accuracy) + "), shifted-geometry transfer acc " + num(cross.target.accuracy) +
              " (>= 0.75), label-shuffled control acc " + num(control.target.accuracy) + " (<= 0.6)"};
}

// 9
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Outcome explainability(const Corpus& corpus, const fs::path& work) {
  const auto model = roadgraph::train_classifier(corpus.data, corpus.run).model;
  const auto dump = roadgraph::explain(model, corpus.data);

  double first_sum = 0.0, final_sum = 0.0;
  std::size_t first_n = 0, final_n = 0;
  double worst_beta = 0.0;
  std::size_t expected_rows = 0;
  for (std::size_t c = 0; c < dump.clips.size(); ++c) {
    const auto& clip = corpus.data.clips[c];
    const auto& ca = dump.clips[c];
    double beta_sum = 0.0;
    for (const auto& fa : ca.frames) {
      beta_sum += fa.beta.value_or(0.0);
      expected_rows += fa.node_labels.size();
    }
    worst_beta = std::max(worst_beta, std::fabs(beta_sum - 1.0));
    const auto it = clip.metadata.find(roadgraph::kApproachingIdKey);
    if (clip.label != 1 || it == clip.metadata.end()) continue;
    const std::size_t t = clip.graphs.size();
    for (std::size_t f = 0; f < t; ++f) {
      const bool first = f < 3, last = f + 3 >= t;
      if (!first && !last) continue;
      const auto& nodes = clip.graphs[f].nodes;
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].attributes.source_id != it->second) continue;
        const double a = (*ca.frames[f].alpha)[n];
        if (first) first_sum += a, ++first_n;
        if (last) final_sum += a, ++final_n;
      }
    }
  }
  const double first_mean = first_sum / static_cast<double>(std::max<std::size_t>(first_n, 1));
  const double final_mean = final_sum / static_cast<double>(std::max<std::size_t>(final_n, 1));

  // Schema check on the written file.
  const auto csv_path = work / "attention.csv";
  roadgraph::write_text_file(csv_path, roadgraph::attention_csv(dump));
  std::ifstream in(csv_path);
  std::string line;
  std::getline(in, line);
  bool schema = line == "clip_id,frame_index,node_label,alpha,beta,prediction,label";
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto fields = split_csv_line(line);
    ++rows;
    if (fields.size() != 7) {
      schema = false;
      continue;
    }
    const double alpha = std::stod(fields[3]);
    const double beta = std::stod(fields[4]);
    schema = schema && alpha >= -1.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0 &&
             (fields[5] == "0" || fields[5] == "1") && (fields[6] == "0" || fields[6] == "1");
  }
  schema = schema && rows == expected_rows;
  return {final_mean > first_mean && schema && worst_beta <= 1e-9,
          "approaching-vehicle mean alpha first3 " + num(first_mean) + " vs final3 " + num(final_mean) + " (" +
              std::to_string(first_n) + "/" + std::to_string(final_n) + " samples), csv rows " + std::to_string(rows) +
              " schema " + (schema ? "ok" : "bad") + ", max |sum beta - 1| " + sci(worst_beta)};
}

// 10
int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"roadgraph"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = roadgraph::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << "cli " << args.front() << " failed: " << err.str();
  return code;
}

Outcome determinism(const fs::path& work) {
  const auto scenario = work / "scenario.json";
  roadgraph::SynthConfig sc;
  sc.clips = 40;
  roadgraph::write_text_file(scenario, sc.to_json_text());
  std::vector<std::string> artifacts;
  bool ok = true;
  for (const char* tag : {"a", "b"}) {
    const auto dir = work / ("run_" + std::string(tag));
    fs::remove_all(dir);
    const auto s = [&](const char* p) { return (dir / p).string(); };
    ok = ok && cli({"synth", "--config", scenario.string(), "--out", s("raw"), "--seed", "3"}) == 0;
    ok = ok && cli({"extract", "--dataset", s("raw"), "--out", s("graphs.sgd")}) == 0;
    ok = ok && cli({"train", "--dataset", s("graphs.sgd"), "--out", s("train"), "--seed", "3", "--epochs", "4", "--folds", "2"}) == 0;
    ok = ok && cli({"evaluate", "--checkpoint", s("train/checkpoint.json"), "--dataset", s("graphs.sgd"), "--out", s("eval")}) == 0;
  }
  std::size_t identical = 0, compared = 0;
  for (const char* rel : {"graphs.sgd", "train/checkpoint.json", "train/results.json", "train/metrics.jsonl", "eval/results.json"}) {
    const auto a = read_file(work / "run_a" / rel);
    const auto b = read_file(work / "run_b" / rel);
    ++compared;
    if (!a.empty() && a == b) ++identical;
  }
  return {ok && identical == compared, "synth -> extract -> train -> evaluate twice (40 clips, 4 epochs, 2 folds): " +
                                           std::to_string(identical) + "/" + std::to_string(compared) +
                                           " artifacts byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_work");
  fs::create_directories(work);

  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << " " << name << ": " << o.detail << std::endl;
  };

  const auto frames = random_corpus();
  report(1, "extraction oracle equivalence", [&] { return extraction_oracle(frames); });
  report(2, "threshold nesting", [&] { return threshold_nesting(frames); });
  report(3, "homography", [] { return homography(); });
  report(4, "gradient checks", [] { return gradient_checks(); });
  report(5, "metric oracles", [] { return metric_oracles(); });

  Corpus corpus{extract_synth(roadgraph::SynthConfig{}, 0), roadgraph::TrainRun{}};
  report(6, "synthetic learnability", [&] { return learnability(corpus); });
  report(7, "synthetic collision prediction", [&] { return collision_prediction(corpus); });
  report(8, "transfer harness", [&] { return transfer(corpus); });
  report(9, "explainability", [&] { return explainability(corpus, work); });
  report(10, "determinism", [&] { return determinism(work); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
