#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roadgraph/random.hpp"
#include "roadgraph/tensor.hpp"

namespace roadgraph::ad {

struct NamedParameter {
  std::string name;
  Tensor tensor;
};
using ParameterList = std::vector<NamedParameter>;

enum class OptimizerKind { kSgd, kAdam };

// SGD or bias-corrected Adam over a fixed parameter list. step() consumes
// the gradients: they are cleared afterwards.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
            double epsilon = 1e-8);

  // Parameters without a gradient are skipped; throws MissingGradient when
  // no parameter has one.
  void step(const ParameterList& params);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  std::int64_t steps() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)); fan_in = rows.
Tensor glorot_init(std::size_t rows, std::size_t cols, Rng& rng, bool requires_grad = true);
Tensor glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed, bool requires_grad = true);

}  // namespace roadgraph::ad
