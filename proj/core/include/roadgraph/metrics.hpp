#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace roadgraph {

struct Confusion {
  std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(const std::vector<int>& predictions, const std::vector<int>& labels);

// Mann-Whitney form: fraction of (positive, negative) pairs ranked
// correctly, ties counting 1/2. Throws UndefinedAUC for one-class labels.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// 0 when any factor of the denominator is 0.
double mcc(const Confusion& c);

struct Scores {
  double accuracy = 0.0;
  std::optional<double> auc;  // absent when the labels hold a single class
  double mcc = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  Confusion confusion;
  std::vector<Scores> per_fold;

  bool operator==(const Scores&) const = default;
};

Scores score(const std::vector<int>& predictions, const std::vector<double>& prob_risky,
             const std::vector<int>& labels);

// Field-wise mean over folds (confusions summed); per_fold keeps the inputs.
Scores average_folds(const std::vector<Scores>& folds);

// JSON object text with fixed key order.
std::string scores_to_json(const Scores& s, bool include_folds = true);

}  // namespace roadgraph
