#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace roadgraph::ad {

class Tape;

struct TensorImpl {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<double> grad;  // empty until a backward pass reaches this tensor
  bool requires_grad = false;
  const Tape* tape = nullptr;  // recording tape for op outputs, null for leaves

  std::vector<double>& grad_buffer() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
    return grad;
  }
};

// Dense row-major float64 matrix handle. Vectors are 1 x n rows; scalars are
// 1 x 1. Copies share storage, so a parameter tensor held by a model and by
// a tape is the same object.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(std::size_t rows, std::size_t cols, bool requires_grad = false);
  static Tensor filled(std::size_t rows, std::size_t cols, double value);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor identity(std::size_t n, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  std::size_t rows() const { return impl_->rows; }
  std::size_t cols() const { return impl_->cols; }
  std::size_t size() const { return impl_->data.size(); }
  std::vector<std::size_t> shape() const { return {impl_->rows, impl_->cols}; }
  std::string shape_string() const;

  std::span<const double> data() const { return impl_->data; }
  std::span<double> mutable_data() { return impl_->data; }
  double at(std::size_t r, std::size_t c) const { return impl_->data[r * impl_->cols + c]; }
  double& at(std::size_t r, std::size_t c) { return impl_->data[r * impl_->cols + c]; }
  double item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool value) { impl_->requires_grad = value; }
  bool has_grad() const { return !impl_->grad.empty(); }
  // Gradient values; zeros when no backward pass has reached the tensor.
  std::vector<double> grad() const;
  void zero_grad() { impl_->grad.clear(); }

  // Detached copy with its own storage.
  Tensor clone() const;

  TensorImpl* impl() const { return impl_.get(); }
  const std::shared_ptr<TensorImpl>& shared() const { return impl_; }

 private:
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}
  friend class Tape;
  friend Tensor make_result(std::size_t, std::size_t, std::vector<double>);

  std::shared_ptr<TensorImpl> impl_;
};

Tensor make_result(std::size_t rows, std::size_t cols, std::vector<double> data);

// Ordered record of primitive applications for one forward episode. Ops
// record onto the tape made current by a Tape::Recording guard on the same
// thread; without an active tape nothing is recorded (inference mode).
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  class Recording {
   public:
    explicit Recording(Tape& tape);
    ~Recording();
    Recording(const Recording&) = delete;
    Recording& operator=(const Recording&) = delete;

   private:
    Tape* previous_;
  };

  static Tape* current();

  // Called by primitives. `backward` reads the output gradient and
  // accumulates into the inputs that require gradients.
  void record(const Tensor& output, std::vector<Tensor> inputs, std::function<void()> backward);

  std::size_t size() const { return entries_.size(); }
  bool consumed() const { return consumed_; }

 private:
  friend void backward(Tape& tape, const Tensor& loss);

  struct Entry {
    Tensor output;
    std::vector<Tensor> inputs;
    std::function<void()> backward;
  };
  std::vector<Entry> entries_;
  bool consumed_ = false;
};

// True when the next op over `inputs` should be recorded.
bool should_record(std::initializer_list<const Tensor*> inputs);

// Reverse sweep from a scalar loss recorded on `tape`; leaf gradients
// accumulate. Throws RankError for a non-scalar loss. A tape supports one
// backward pass.
void backward(Tape& tape, const Tensor& loss);

}  // namespace roadgraph::ad
