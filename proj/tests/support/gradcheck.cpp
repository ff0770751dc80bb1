#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "roadgraph/ops.hpp"

namespace gradcheck {

namespace ad = roadgraph::ad;

Result check(const std::function<Tensor()>& loss, const ad::ParameterList& params, double h) {
  for (const auto& p : params) p.tensor.impl()->grad.clear();
  {
    ad::Tape tape;
    Tensor value;
    {
      ad::Tape::Recording rec(tape);
      value = loss();
    }
    ad::backward(tape, value);
  }
  Result result;
  for (const auto& p : params) {
    const auto analytic = p.tensor.grad();
    auto& data = p.tensor.impl()->data;
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + h;
      const double up = loss().item();
      data[i] = saved - h;
      const double down = loss().item();
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      diff2 += (analytic[i] - numeric) * (analytic[i] - numeric);
      a2 += analytic[i] * analytic[i];
      n2 += numeric * numeric;
    }
    const double err = std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-8});
    if (err >= result.max_rel_error) {
      result.max_rel_error = err;
      result.worst = p.name;
    }
    p.tensor.impl()->grad.clear();
  }
  return result;
}

Tensor random_tensor(std::size_t rows, std::size_t cols, roadgraph::Rng& rng, bool requires_grad, double scale) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return Tensor(rows, cols, std::move(v), requires_grad);
}

Tensor contract(const Tensor& out, const Tensor& weights) {
  return ad::sum(ad::sum(ad::mul(out, weights), 0), 1);
}

}  // namespace gradcheck
