#include "roadgraph/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roadgraph/error.hpp"
#include "roadgraph/ops.hpp"

namespace roadgraph::layers {

namespace {

void check_relations(const GraphInput& graph, std::size_t available) {
  for (const auto& adj : graph.adjacency) {
    if (adj.relation >= available) {
      raise(ErrorCode::kRelationIndexError, "relation id " + std::to_string(adj.relation) +
                                                " but the layer has " + std::to_string(available) +
                                                " relation weights");
    }
  }
}

// Broadcast an N x 1 column across `cols` columns.
Tensor spread_column(const Tensor& column, std::size_t cols) {
  return ad::matmul(column, Tensor::filled(1, cols, 1.0));
}

PoolResult gate_and_keep(const Tensor& x, const Tensor& scores, const TypedEdgeList& edges, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) raise(ErrorCode::kInvalidArgument, "pool ratio must lie in (0, 1]");
  const std::size_t n = x.rows();
  PoolResult out;
  out.scores.assign(scores.data().begin(), scores.data().end());
  if (n == 0) {
    out.x = x;
    out.edges = edges;
    return out;
  }
  out.kept = top_k_indices(out.scores, pooled_count(n, ratio));
  const Tensor kept_x = ad::gather_rows(x, out.kept);
  const Tensor kept_s = ad::gather_rows(scores, out.kept);
  out.x = ad::mul(kept_x, spread_column(kept_s, x.cols()));
  out.edges = filter_edges(edges, out.kept, n);
  return out;
}

}  // namespace

Linear Linear::init(std::size_t in, std::size_t out, Rng& rng) {
  return {ad::glorot_init(in, out, rng), Tensor::zeros(1, out, true)};
}

Tensor Linear::forward(const Tensor& x) const { return ad::add(ad::matmul(x, weight), bias); }

void Linear::collect(const std::string& prefix, ad::ParameterList& out) const {
  out.push_back({prefix + ".weight", weight});
  out.push_back({prefix + ".bias", bias});
}

MrgcnParams MrgcnParams::init(std::size_t in, std::size_t out, std::size_t relations, Rng& rng) {
  MrgcnParams p;
  p.w_self = ad::glorot_init(in, out, rng);
  for (std::size_t r = 0; r < relations; ++r) p.w_rel.push_back(ad::glorot_init(in, out, rng));
  p.bias = Tensor::zeros(1, out, true);
  return p;
}

void MrgcnParams::collect(const std::string& prefix, ad::ParameterList& out) const {
  out.push_back({prefix + ".w_self", w_self});
  for (std::size_t r = 0; r < w_rel.size(); ++r) out.push_back({prefix + ".w_rel." + std::to_string(r), w_rel[r]});
  out.push_back({prefix + ".bias", bias});
}

Tensor mrgcn_layer(const Tensor& x, const GraphInput& graph, const MrgcnParams& p, bool apply_relu) {
  check_relations(graph, p.w_rel.size());
  Tensor h = ad::matmul(x, p.w_self);
  for (const auto& adj : graph.adjacency) {
    h = ad::add(h, ad::matmul(ad::matmul(adj.mean, x), p.w_rel[adj.relation]));
  }
  h = ad::add(h, p.bias);
  return apply_relu ? ad::relu(h) : h;
}

MrginParams MrginParams::init(std::size_t in, std::size_t out, std::size_t relations, Rng& rng) {
  MrginParams p;
  p.eps = Tensor::zeros(1, 1, true);
  for (std::size_t r = 0; r < relations; ++r) p.w_rel.push_back(ad::glorot_init(in, in, rng));
  p.mlp_in = Linear::init(in, out, rng);
  p.mlp_out = Linear::init(out, out, rng);
  return p;
}

void MrginParams::collect(const std::string& prefix, ad::ParameterList& out) const {
  out.push_back({prefix + ".eps", eps});
  for (std::size_t r = 0; r < w_rel.size(); ++r) out.push_back({prefix + ".w_rel." + std::to_string(r), w_rel[r]});
  mlp_in.collect(prefix + ".mlp_in", out);
  mlp_out.collect(prefix + ".mlp_out", out);
}

Tensor mrgin_layer(const Tensor& x, const GraphInput& graph, const MrginParams& p) {
  check_relations(graph, p.w_rel.size());
  // (1 + eps) X = X + (eps broadcast to N x F) * X
  const Tensor eps_full = ad::matmul(ad::matmul(Tensor::filled(x.rows(), 1, 1.0), p.eps),
                                     Tensor::filled(1, x.cols(), 1.0));
  Tensor h = ad::add(x, ad::mul(eps_full, x));
  for (const auto& adj : graph.adjacency) {
    h = ad::add(h, ad::matmul(ad::matmul(adj.sum, x), p.w_rel[adj.relation]));
  }
  return p.mlp_out.forward(ad::relu(p.mlp_in.forward(h)));
}

std::size_t pooled_count(std::size_t n, double ratio) {
  if (n == 0) return 0;
  // Guard against ratio * n landing a hair above an integer.
  const double raw = ratio * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

PoolResult sagpool(const Tensor& x, const GraphInput& graph, const MrgcnParams& score, double ratio) {
  const Tensor s = ad::tanh(mrgcn_layer(x, graph, score, false));
  return gate_and_keep(x, s, graph.edges, ratio);
}

PoolResult topk_pool(const Tensor& x, const TypedEdgeList& edges, const Tensor& projection, double ratio) {
  const Tensor s = ad::tanh(ad::normalized_projection(x, projection));
  return gate_and_keep(x, s, edges, ratio);
}

Tensor readout(const Tensor& x, ReadoutKind kind) {
  if (x.rows() == 0) return Tensor::zeros(1, x.cols());
  switch (kind) {
    case ReadoutKind::kMax: return ad::max(x, 0);
    case ReadoutKind::kMean: return ad::mean(x, 0);
    case ReadoutKind::kAdd: return ad::sum(x, 0);
  }
  return ad::sum(x, 0);
}

LstmParams LstmParams::init(std::size_t in, std::size_t hidden, Rng& rng) {
  LstmParams p;
  p.input_gate = Linear::init(in + hidden, hidden, rng);
  p.forget_gate = Linear::init(in + hidden, hidden, rng);
  p.cell_gate = Linear::init(in + hidden, hidden, rng);
  p.output_gate = Linear::init(in + hidden, hidden, rng);
  p.hidden = hidden;
  return p;
}

void LstmParams::collect(const std::string& prefix, ad::ParameterList& out) const {
  input_gate.collect(prefix + ".input_gate", out);
  forget_gate.collect(prefix + ".forget_gate", out);
  cell_gate.collect(prefix + ".cell_gate", out);
  output_gate.collect(prefix + ".output_gate", out);
}

LstmState lstm_zero_state(std::size_t hidden) {
  return {Tensor::zeros(1, hidden), Tensor::zeros(1, hidden)};
}

LstmState lstm_step(const Tensor& x, const LstmState& prev, const LstmParams& p) {
  const Tensor joint = ad::concat({x, prev.p}, 1);
  const Tensor i = ad::sigmoid(p.input_gate.forward(joint));
  const Tensor f = ad::sigmoid(p.forget_gate.forward(joint));
  const Tensor g = ad::tanh(p.cell_gate.forward(joint));
  const Tensor o = ad::sigmoid(p.output_gate.forward(joint));
  const Tensor c = ad::add(ad::mul(f, prev.c), ad::mul(i, g));
  return {ad::mul(o, ad::tanh(c)), c};
}

AttentionParams AttentionParams::init(std::size_t hidden, std::size_t attn, Rng& rng) {
  return {ad::glorot_init(hidden, attn, rng), ad::glorot_init(attn, 1, rng)};
}

void AttentionParams::collect(const std::string& prefix, ad::ParameterList& out) const {
  out.push_back({prefix + ".w", w});
  out.push_back({prefix + ".v", v});
}

AttentionResult temporal_attention(const Tensor& outputs, const AttentionParams& p) {
  const Tensor energy = ad::matmul(ad::tanh(ad::matmul(outputs, p.w)), p.v);  // T x 1
  const Tensor beta = ad::softmax(energy, 0);
  const Tensor weighted = ad::mul(outputs, spread_column(beta, outputs.cols()));
  return {ad::sum(weighted, 0), beta};
}

Mlp Mlp::init(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, Rng& rng) {
  Mlp mlp;
  std::size_t width = in;
  for (auto h : hidden) {
    mlp.layers.push_back(Linear::init(width, h, rng));
    width = h;
  }
  mlp.layers.push_back(Linear::init(width, out, rng));
  return mlp;
}

Tensor Mlp::forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = layers[i].forward(h);
    if (i + 1 < layers.size()) h = ad::relu(h);
  }
  return h;
}

void Mlp::collect(const std::string& prefix, ad::ParameterList& out) const {
  for (std::size_t i = 0; i < layers.size(); ++i) layers[i].collect(prefix + "." + std::to_string(i), out);
}

Tensor dropout(const Tensor& x, double p, Rng* rng) {
  if (rng == nullptr || p <= 0.0) return x;
  std::vector<double> mask(x.size());
  const double keep = 1.0 - p;
  for (auto& m : mask) m = rng->uniform() < keep ? 1.0 / keep : 0.0;
  return ad::mul(x, Tensor(x.rows(), x.cols(), std::move(mask)));
}

}  // namespace roadgraph::layers
