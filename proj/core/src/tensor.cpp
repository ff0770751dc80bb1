#include "roadgraph/tensor.hpp"

#include "roadgraph/error.hpp"

namespace roadgraph::ad {

namespace {
thread_local Tape* g_current_tape = nullptr;
}  // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data, bool requires_grad)
    : impl_(std::make_shared<TensorImpl>()) {
  if (data.size() != rows * cols) {
    raise(ErrorCode::kShapeError, "data length " + std::to_string(data.size()) + " does not match shape (" +
                                      std::to_string(rows) + ", " + std::to_string(cols) + ")");
  }
  impl_->rows = rows;
  impl_->cols = cols;
  impl_->data = std::move(data);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols, bool requires_grad) {
  return Tensor(rows, cols, std::vector<double>(rows * cols, 0.0), requires_grad);
}

Tensor Tensor::filled(std::size_t rows, std::size_t cols, double value) {
  return Tensor(rows, cols, std::vector<double>(rows * cols, value));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(1, 1, {value}, requires_grad);
}

Tensor Tensor::identity(std::size_t n, bool requires_grad) {
  auto t = zeros(n, n, requires_grad);
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

std::string Tensor::shape_string() const {
  return "(" + std::to_string(rows()) + ", " + std::to_string(cols()) + ")";
}

double Tensor::item() const {
  if (size() != 1) raise(ErrorCode::kRankError, "item() on tensor of shape " + shape_string());
  return impl_->data[0];
}

std::vector<double> Tensor::grad() const {
  if (impl_->grad.empty()) return std::vector<double>(impl_->data.size(), 0.0);
  return impl_->grad;
}

Tensor Tensor::clone() const {
  return Tensor(rows(), cols(), impl_->data, impl_->requires_grad);
}

Tensor make_result(std::size_t rows, std::size_t cols, std::vector<double> data) {
  auto impl = std::make_shared<TensorImpl>();
  impl->rows = rows;
  impl->cols = cols;
  impl->data = std::move(data);
  return Tensor(std::move(impl));
}

Tape::Recording::Recording(Tape& tape) : previous_(g_current_tape) { g_current_tape = &tape; }

Tape::Recording::~Recording() { g_current_tape = previous_; }

Tape* Tape::current() { return g_current_tape; }

void Tape::record(const Tensor& output, std::vector<Tensor> inputs, std::function<void()> backward) {
  if (consumed_) raise(ErrorCode::kInternal, "recording onto a tape that already ran backward");
  output.impl()->requires_grad = true;
  output.impl()->tape = this;
  entries_.push_back({output, std::move(inputs), std::move(backward)});
}

bool should_record(std::initializer_list<const Tensor*> inputs) {
  if (g_current_tape == nullptr) return false;
  for (const auto* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

void backward(Tape& tape, const Tensor& loss) {
  if (loss.size() != 1) {
    raise(ErrorCode::kRankError, "backward needs a scalar loss, got shape " + loss.shape_string());
  }
  if (loss.impl()->tape != &tape) {
    raise(ErrorCode::kInvalidArgument, "loss was not recorded on this tape");
  }
  if (tape.consumed_) raise(ErrorCode::kInvalidArgument, "tape already ran backward");
  tape.consumed_ = true;
  loss.impl()->grad_buffer()[0] += 1.0;
  for (auto it = tape.entries_.rbegin(); it != tape.entries_.rend(); ++it) {
    if (it->output.impl()->grad.empty()) continue;
    it->backward();
  }
  // Release intermediate buffers; leaves keep their gradients.
  tape.entries_.clear();
}

}  // namespace roadgraph::ad
