#include "roadgraph/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "roadgraph/error.hpp"

namespace roadgraph::ad {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  raise(ErrorCode::kShapeError,
        std::string(op) + ": incompatible shapes " + a.shape_string() + " and " + b.shape_string());
}

void check_axis(const char* op, int axis) {
  if (axis != 0 && axis != 1) {
    raise(ErrorCode::kShapeError, std::string(op) + ": axis must be 0 or 1, got " + std::to_string(axis));
  }
}

// C += A(m x k) * B(k x n)
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C(m x k) += G(m x n) * B(k x n)^T
void gemm_nt(const double* g, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      c[i * k + p] += acc;
    }
  }
}

// C(k x n) += A(m x k)^T * G(m x n)
void gemm_tn(const double* a, const double* g, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

template <typename Fn, typename Deriv>
Tensor unary(const Tensor& a, Fn fn, Deriv deriv) {
  std::vector<double> out(a.size());
  const auto in = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(in[i]);
  Tensor result = make_result(a.rows(), a.cols(), std::move(out));
  if (should_record({&a})) {
    auto* ai = a.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a}, [ai, oi, deriv] {
      auto& ga = ai->grad_buffer();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += oi->grad[i] * deriv(ai->data[i], oi->data[i]);
    });
  }
  return result;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n);
  Tensor result = make_result(m, n, std::move(out));
  if (should_record({&a, &b})) {
    auto* ai = a.impl();
    auto* bi = b.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a, b}, [ai, bi, oi, m, k, n] {
      if (ai->requires_grad) gemm_nt(oi->grad.data(), bi->data.data(), ai->grad_buffer().data(), m, k, n);
      if (bi->requires_grad) gemm_tn(ai->data.data(), oi->grad.data(), bi->grad_buffer().data(), m, k, n);
    });
  }
  return result;
}

Tensor add(const Tensor& a, const Tensor& b) {
  const bool same = a.rows() == b.rows() && a.cols() == b.cols();
  const bool row_broadcast = b.rows() == 1 && b.cols() == a.cols();
  if (!same && !row_broadcast) shape_error("add", a, b);
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bd = b.data();
  if (same) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bd[i];
  } else {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bd[c];
    }
  }
  Tensor result = make_result(rows, cols, std::move(out));
  if (should_record({&a, &b})) {
    auto* ai = a.impl();
    auto* bi = b.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a, b}, [ai, bi, oi, same, rows, cols] {
      if (ai->requires_grad) {
        auto& ga = ai->grad_buffer();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += oi->grad[i];
      }
      if (bi->requires_grad) {
        auto& gb = bi->grad_buffer();
        if (same) {
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += oi->grad[i];
        } else {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) gb[c] += oi->grad[r * cols + c];
          }
        }
      }
    });
  }
  return result;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("mul", a, b);
  std::vector<double> out(a.size());
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * bd[i];
  Tensor result = make_result(a.rows(), a.cols(), std::move(out));
  if (should_record({&a, &b})) {
    auto* ai = a.impl();
    auto* bi = b.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a, b}, [ai, bi, oi] {
      if (ai->requires_grad) {
        auto& ga = ai->grad_buffer();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += oi->grad[i] * bi->data[i];
      }
      if (bi->requires_grad) {
        auto& gb = bi->grad_buffer();
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += oi->grad[i] * ai->data[i];
      }
    });
  }
  return result;
}

Tensor scale(const Tensor& a, double factor) {
  return unary(a, [factor](double x) { return factor * x; },
               [factor](double, double) { return factor; });
}

Tensor relu(const Tensor& a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(a,
               [](double x) {
                 if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
                 const double e = std::exp(x);
                 return e / (1.0 + e);
               },
               [](double, double y) { return y * (1.0 - y); });
}

Tensor softmax(const Tensor& a, int axis) {
  check_axis("softmax", axis);
  const std::size_t rows = a.rows(), cols = a.cols();
  const std::size_t groups = axis == 1 ? rows : cols;
  const std::size_t len = axis == 1 ? cols : rows;
  auto index = [=](std::size_t g, std::size_t t) { return axis == 1 ? g * cols + t : t * cols + g; };
  std::vector<double> out(a.size());
  const auto in = a.data();
  for (std::size_t g = 0; g < groups; ++g) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < len; ++t) hi = std::max(hi, in[index(g, t)]);
    double total = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      out[index(g, t)] = std::exp(in[index(g, t)] - hi);
      total += out[index(g, t)];
    }
    for (std::size_t t = 0; t < len; ++t) out[index(g, t)] /= total;
  }
  Tensor result = make_result(rows, cols, std::move(out));
  if (should_record({&a})) {
    auto* ai = a.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a}, [ai, oi, groups, len, index] {
      auto& ga = ai->grad_buffer();
      for (std::size_t g = 0; g < groups; ++g) {
        double dot = 0.0;
        for (std::size_t t = 0; t < len; ++t) dot += oi->grad[index(g, t)] * oi->data[index(g, t)];
        for (std::size_t t = 0; t < len; ++t) {
          const auto i = index(g, t);
          ga[i] += oi->data[i] * (oi->grad[i] - dot);
        }
      }
    });
  }
  return result;
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  check_axis("concat", axis);
  if (parts.empty()) raise(ErrorCode::kShapeError, "concat: no inputs");
  std::size_t rows = parts[0].rows(), cols = parts[0].cols();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    if (axis == 0) {
      if (parts[p].cols() != cols) shape_error("concat", parts[0], parts[p]);
      rows += parts[p].rows();
    } else {
      if (parts[p].rows() != rows) shape_error("concat", parts[0], parts[p]);
      cols += parts[p].cols();
    }
  }
  std::vector<double> out(rows * cols);
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& part : parts) {
    offsets.push_back(offset);
    const auto d = part.data();
    for (std::size_t r = 0; r < part.rows(); ++r) {
      for (std::size_t c = 0; c < part.cols(); ++c) {
        const auto dst = axis == 0 ? (offset + r) * cols + c : r * cols + offset + c;
        out[dst] = d[r * part.cols() + c];
      }
    }
    offset += axis == 0 ? part.rows() : part.cols();
  }
  Tensor result = make_result(rows, cols, std::move(out));
  bool record = false;
  if (Tape::current() != nullptr) {
    for (const auto& part : parts) record = record || part.requires_grad();
  }
  if (record) {
    auto* oi = result.impl();
    std::vector<TensorImpl*> impls;
    for (const auto& part : parts) impls.push_back(part.impl());
    Tape::current()->record(result, parts, [impls, offsets, oi, axis, cols] {
      for (std::size_t p = 0; p < impls.size(); ++p) {
        auto* pi = impls[p];
        if (!pi->requires_grad) continue;
        auto& gp = pi->grad_buffer();
        for (std::size_t r = 0; r < pi->rows; ++r) {
          for (std::size_t c = 0; c < pi->cols; ++c) {
            const auto src = axis == 0 ? (offsets[p] + r) * cols + c : r * cols + offsets[p] + c;
            gp[r * pi->cols + c] += oi->grad[src];
          }
        }
      }
    });
  }
  return result;
}

Tensor sum(const Tensor& a, int axis) {
  check_axis("sum", axis);
  const std::size_t rows = a.rows(), cols = a.cols();
  const auto in = a.data();
  std::vector<double> out(axis == 0 ? cols : rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[axis == 0 ? c : r] += in[r * cols + c];
  }
  Tensor result = axis == 0 ? make_result(1, cols, std::move(out)) : make_result(rows, 1, std::move(out));
  if (should_record({&a})) {
    auto* ai = a.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a}, [ai, oi, axis, rows, cols] {
      auto& ga = ai->grad_buffer();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += oi->grad[axis == 0 ? c : r];
      }
    });
  }
  return result;
}

Tensor mean(const Tensor& a, int axis) {
  check_axis("mean", axis);
  const std::size_t n = axis == 0 ? a.rows() : a.cols();
  if (n == 0) return axis == 0 ? Tensor::zeros(1, a.cols()) : Tensor::zeros(a.rows(), 1);
  return scale(sum(a, axis), 1.0 / static_cast<double>(n));
}

Tensor max(const Tensor& a, int axis) {
  check_axis("max", axis);
  const std::size_t rows = a.rows(), cols = a.cols();
  const std::size_t groups = axis == 0 ? cols : rows;
  const std::size_t len = axis == 0 ? rows : cols;
  if (len == 0) return axis == 0 ? Tensor::zeros(1, cols) : Tensor::zeros(rows, 1);
  auto index = [=](std::size_t g, std::size_t t) { return axis == 0 ? t * cols + g : g * cols + t; };
  const auto in = a.data();
  std::vector<double> out(groups);
  std::vector<std::size_t> arg(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::size_t best = index(g, 0);
    for (std::size_t t = 1; t < len; ++t) {
      if (in[index(g, t)] > in[best]) best = index(g, t);
    }
    out[g] = in[best];
    arg[g] = best;
  }
  Tensor result = axis == 0 ? make_result(1, cols, std::move(out)) : make_result(rows, 1, std::move(out));
  if (should_record({&a})) {
    auto* ai = a.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a}, [ai, oi, arg] {
      auto& ga = ai->grad_buffer();
      for (std::size_t g = 0; g < arg.size(); ++g) ga[arg[g]] += oi->grad[g];
    });
  }
  return result;
}

Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& indices) {
  const std::size_t cols = a.cols();
  std::vector<double> out(indices.size() * cols);
  const auto in = a.data();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= a.rows()) {
      raise(ErrorCode::kShapeError, "gather_rows: index " + std::to_string(indices[r]) +
                                        " out of range for shape " + a.shape_string());
    }
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(indices[r] * cols), cols, out.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  Tensor result = make_result(indices.size(), cols, std::move(out));
  if (should_record({&a})) {
    auto* ai = a.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a}, [ai, oi, indices, cols] {
      auto& ga = ai->grad_buffer();
      for (std::size_t r = 0; r < indices.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) ga[indices[r] * cols + c] += oi->grad[r * cols + c];
      }
    });
  }
  return result;
}

Tensor scatter_add_rows(const Tensor& a, const std::vector<std::size_t>& indices, std::size_t out_rows) {
  if (indices.size() != a.rows()) {
    raise(ErrorCode::kShapeError, "scatter_add_rows: " + std::to_string(indices.size()) +
                                      " indices for shape " + a.shape_string());
  }
  const std::size_t cols = a.cols();
  std::vector<double> out(out_rows * cols, 0.0);
  const auto in = a.data();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= out_rows) {
      raise(ErrorCode::kShapeError, "scatter_add_rows: index " + std::to_string(indices[r]) +
                                        " out of range for " + std::to_string(out_rows) + " rows");
    }
    for (std::size_t c = 0; c < cols; ++c) out[indices[r] * cols + c] += in[r * cols + c];
  }
  Tensor result = make_result(out_rows, cols, std::move(out));
  if (should_record({&a})) {
    auto* ai = a.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {a}, [ai, oi, indices, cols] {
      auto& ga = ai->grad_buffer();
      for (std::size_t r = 0; r < indices.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += oi->grad[indices[r] * cols + c];
      }
    });
  }
  return result;
}

Tensor normalized_projection(const Tensor& x, const Tensor& p) {
  if (p.cols() != 1 || p.rows() != x.cols()) shape_error("normalized_projection", x, p);
  const std::size_t n = x.rows(), f = x.cols();
  double norm_sq = 0.0;
  for (double v : p.data()) norm_sq += v * v;
  if (!(norm_sq > 0.0)) raise(ErrorCode::kDegenerateProjection, "projection vector is zero");
  const double norm = std::sqrt(norm_sq);
  std::vector<double> out(n, 0.0);
  gemm_nn(x.data().data(), p.data().data(), out.data(), n, f, 1);
  for (auto& v : out) v /= norm;
  Tensor result = make_result(n, 1, std::move(out));
  if (should_record({&x, &p})) {
    auto* xi = x.impl();
    auto* pi = p.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {x, p}, [xi, pi, oi, n, f, norm] {
      if (xi->requires_grad) {
        auto& gx = xi->grad_buffer();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t c = 0; c < f; ++c) gx[i * f + c] += oi->grad[i] * pi->data[c] / norm;
        }
      }
      if (pi->requires_grad) {
        // d(y_i)/dp = x_i / |p| - y_i p / |p|^2
        auto& gp = pi->grad_buffer();
        for (std::size_t i = 0; i < n; ++i) {
          const double gi = oi->grad[i];
          if (gi == 0.0) continue;
          for (std::size_t c = 0; c < f; ++c) {
            gp[c] += gi * (xi->data[i * f + c] / norm - oi->data[i] * pi->data[c] / (norm * norm));
          }
        }
      }
    });
  }
  return result;
}

Tensor cross_entropy(const Tensor& logits, const std::vector<int>& targets,
                     std::pair<double, double> weights) {
  if (logits.cols() != 2 || logits.rows() != targets.size() || targets.empty()) {
    raise(ErrorCode::kShapeError, "cross_entropy: logits " + logits.shape_string() + " with " +
                                      std::to_string(targets.size()) + " targets");
  }
  for (int y : targets) {
    if (y != 0 && y != 1) raise(ErrorCode::kLabelError, "cross_entropy target " + std::to_string(y));
  }
  const std::size_t n = targets.size();
  const auto in = logits.data();
  std::vector<double> probs(2 * n);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = in[2 * i], b = in[2 * i + 1];
    const double hi = std::max(a, b);
    const double lse = hi + std::log(std::exp(a - hi) + std::exp(b - hi));
    probs[2 * i] = std::exp(a - lse);
    probs[2 * i + 1] = std::exp(b - lse);
    const double w = targets[i] == 1 ? weights.second : weights.first;
    loss += -w * (in[2 * i + targets[i]] - lse);
  }
  loss /= static_cast<double>(n);
  Tensor result = make_result(1, 1, {loss});
  if (should_record({&logits})) {
    auto* li = logits.impl();
    auto* oi = result.impl();
    Tape::current()->record(result, {logits}, [li, oi, probs, targets, weights, n] {
      auto& g = li->grad_buffer();
      const double upstream = oi->grad[0] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double w = targets[i] == 1 ? weights.second : weights.first;
        for (int c = 0; c < 2; ++c) {
          const double indicator = targets[i] == c ? 1.0 : 0.0;
          g[2 * i + c] += upstream * w * (probs[2 * i + c] - indicator);
        }
      }
    });
  }
  return result;
}

std::vector<double> softmax_row(const Tensor& logits, std::size_t row) {
  const std::size_t cols = logits.cols();
  std::vector<double> out(cols);
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cols; ++c) hi = std::max(hi, logits.at(row, c));
  double total = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    out[c] = std::exp(logits.at(row, c) - hi);
    total += out[c];
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace roadgraph::ad
