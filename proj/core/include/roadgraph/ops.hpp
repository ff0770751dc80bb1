#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "roadgraph/tensor.hpp"

// Differentiable primitives. Each records onto the current tape when any
// input requires gradients; shape mismatches throw ShapeError naming the op
// and both shapes.
namespace roadgraph::ad {

Tensor matmul(const Tensor& a, const Tensor& b);
// Same shape, or `b` a 1 x cols row broadcast over the rows of `a`.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
// axis 0 normalises each column, axis 1 each row.
Tensor softmax(const Tensor& a, int axis);
Tensor concat(const std::vector<Tensor>& parts, int axis);
// Reductions: axis 0 gives 1 x cols, axis 1 gives rows x 1.
Tensor sum(const Tensor& a, int axis);
Tensor mean(const Tensor& a, int axis);
// Gradient goes to the first maximal entry.
Tensor max(const Tensor& a, int axis);
Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& indices);
Tensor scatter_add_rows(const Tensor& a, const std::vector<std::size_t>& indices,
                        std::size_t out_rows);

// Row scores X p / ||p|| (N x 1). Throws DegenerateProjection for p = 0.
Tensor normalized_projection(const Tensor& x, const Tensor& p);

// Weighted mean over rows of -w[y_i] * log softmax(logits_i)[y_i]; logits
// are N x 2 and targets 0/1 (LabelError otherwise).
Tensor cross_entropy(const Tensor& logits, const std::vector<int>& targets,
                     std::pair<double, double> weights = {1.0, 1.0});

// Row-wise softmax values without recording, for reporting probabilities.
std::vector<double> softmax_row(const Tensor& logits, std::size_t row);

}  // namespace roadgraph::ad
