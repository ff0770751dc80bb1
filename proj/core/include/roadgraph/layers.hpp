#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "roadgraph/featurize.hpp"
#include "roadgraph/optim.hpp"
#include "roadgraph/random.hpp"
#include "roadgraph/tensor.hpp"

// Building blocks of the spatial and temporal graph models. Row-vector
// convention throughout: node features are N x F and weights F_in x F_out.
namespace roadgraph::layers {

using ad::Tensor;

struct Linear {
  Tensor weight;  // in x out
  Tensor bias;    // 1 x out

  static Linear init(std::size_t in, std::size_t out, Rng& rng);
  Tensor forward(const Tensor& x) const;
  void collect(const std::string& prefix, ad::ParameterList& out) const;
};

// X' = act(X W_self + sum_r A_r X W_r + b) with A_r the mean-normalised
// incoming adjacency of relation r.
struct MrgcnParams {
  Tensor w_self;
  std::vector<Tensor> w_rel;
  Tensor bias;

  static MrgcnParams init(std::size_t in, std::size_t out, std::size_t relations, Rng& rng);
  void collect(const std::string& prefix, ad::ParameterList& out) const;
};

Tensor mrgcn_layer(const Tensor& x, const GraphInput& graph, const MrgcnParams& p, bool apply_relu = true);

// X' = MLP((1 + eps) X + sum_r S_r X W_r) with S_r the un-normalised
// incoming adjacency and MLP = Linear -> ReLU -> Linear.
struct MrginParams {
  Tensor eps;  // 1 x 1, starts at 0
  std::vector<Tensor> w_rel;
  Linear mlp_in;
  Linear mlp_out;

  static MrginParams init(std::size_t in, std::size_t out, std::size_t relations, Rng& rng);
  void collect(const std::string& prefix, ad::ParameterList& out) const;
};

Tensor mrgin_layer(const Tensor& x, const GraphInput& graph, const MrginParams& p);

struct PoolResult {
  Tensor x;                          // kept rows gated by their scores
  std::vector<std::size_t> kept;     // ascending original indices
  std::vector<double> scores;        // tanh score per input node
  TypedEdgeList edges;               // restricted to kept nodes, re-indexed
};

// ceil(ratio * N), at least 1.
std::size_t pooled_count(std::size_t n, double ratio);

// Highest scores first, ties to the lower index; result sorted ascending.
std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k);

// Scores from a single-output relational convolution followed by tanh.
PoolResult sagpool(const Tensor& x, const GraphInput& graph, const MrgcnParams& score, double ratio);

// Scores tanh(X p / |p|), independent of edges.
PoolResult topk_pool(const Tensor& x, const TypedEdgeList& edges, const Tensor& projection, double ratio);

enum class ReadoutKind { kMax, kMean, kAdd };
// Column-wise reduction over node rows; zeros for an empty graph.
Tensor readout(const Tensor& x, ReadoutKind kind);

struct LstmParams {
  Linear input_gate, forget_gate, cell_gate, output_gate;  // over [x, p]
  std::size_t hidden = 0;

  static LstmParams init(std::size_t in, std::size_t hidden, Rng& rng);
  void collect(const std::string& prefix, ad::ParameterList& out) const;
};

struct LstmState {
  Tensor p;  // 1 x H hidden output
  Tensor c;  // 1 x H cell
};

LstmState lstm_zero_state(std::size_t hidden);
LstmState lstm_step(const Tensor& x, const LstmState& prev, const LstmParams& p);

// e_t = v^T tanh(W p_t); beta = softmax(e); z = sum_t beta_t p_t.
struct AttentionParams {
  Tensor w;  // H x A
  Tensor v;  // A x 1

  static AttentionParams init(std::size_t hidden, std::size_t attn, Rng& rng);
  void collect(const std::string& prefix, ad::ParameterList& out) const;
};

struct AttentionResult {
  Tensor z;     // 1 x H
  Tensor beta;  // T x 1
};

AttentionResult temporal_attention(const Tensor& outputs, const AttentionParams& p);

// Linear layers with ReLU between them (none after the last).
struct Mlp {
  std::vector<Linear> layers;

  static Mlp init(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, Rng& rng);
  Tensor forward(const Tensor& x) const;
  void collect(const std::string& prefix, ad::ParameterList& out) const;
};

// Training-time inverted dropout; identity when `rng` is null or p == 0.
Tensor dropout(const Tensor& x, double p, Rng* rng);

}  // namespace roadgraph::layers
