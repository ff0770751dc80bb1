#include "roadgraph/optim.hpp"

#include <cmath>

#include "roadgraph/error.hpp"

namespace roadgraph::ad {

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double beta1, double beta2, double epsilon)
    : kind_(kind), lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

void Optimizer::step(const ParameterList& params) {
  bool any = false;
  for (const auto& p : params) any = any || p.tensor.has_grad();
  if (!any) raise(ErrorCode::kMissingGradient, "optimizer step before backward");

  if (kind_ == OptimizerKind::kAdam && m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.tensor.size(), 0.0);
      v_.emplace_back(p.tensor.size(), 0.0);
    }
  }
  if (kind_ == OptimizerKind::kAdam && m_.size() != params.size()) {
    raise(ErrorCode::kInternal, "optimizer state does not match the parameter list");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor p = params[k].tensor;
    if (!p.has_grad()) continue;
    auto* impl = p.impl();
    auto& data = impl->data;
    const auto& g = impl->grad;
    if (kind_ == OptimizerKind::kSgd) {
      for (std::size_t i = 0; i < data.size(); ++i) data[i] -= lr_ * g[i];
    } else {
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < data.size(); ++i) {
        m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
        v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        data[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
      }
    }
    p.zero_grad();
  }
}

Tensor glorot_init(std::size_t rows, std::size_t cols, Rng& rng, bool requires_grad) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::vector<double> data(rows * cols);
  for (auto& x : data) x = rng.uniform(-a, a);
  return Tensor(rows, cols, std::move(data), requires_grad);
}

Tensor glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed, bool requires_grad) {
  Rng rng(seed);
  return glorot_init(rows, cols, rng, requires_grad);
}

}  // namespace roadgraph::ad
