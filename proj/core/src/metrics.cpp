#include "roadgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "roadgraph/error.hpp"

namespace roadgraph {

namespace {

void check_binary(const std::vector<int>& labels, const char* what) {
  for (int y : labels) {
    if (y != 0 && y != 1) raise(ErrorCode::kLabelError, std::string(what) + " must be 0 or 1, got " + std::to_string(y));
  }
}

nlohmann::ordered_json to_json(const Scores& s, bool include_folds) {
  nlohmann::ordered_json j;
  j["accuracy"] = s.accuracy;
  j["auc"] = s.auc ? nlohmann::ordered_json(*s.auc) : nlohmann::ordered_json(nullptr);
  j["mcc"] = s.mcc;
  j["fpr"] = s.fpr;
  j["fnr"] = s.fnr;
  j["confusion"] = {{"tp", s.confusion.tp}, {"tn", s.confusion.tn}, {"fp", s.confusion.fp}, {"fn", s.confusion.fn}};
  if (include_folds && !s.per_fold.empty()) {
    auto folds = nlohmann::ordered_json::array();
    for (const auto& f : s.per_fold) folds.push_back(to_json(f, false));
    j["per_fold"] = std::move(folds);
  }
  return j;
}

}  // namespace

Confusion confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    raise(ErrorCode::kShapeError, "predictions and labels differ in length");
  }
  check_binary(predictions, "predictions");
  check_binary(labels, "labels");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      (predictions[i] == 1 ? c.tp : c.fn)++;
    } else {
      (predictions[i] == 1 ? c.fp : c.tn)++;
    }
  }
  return c;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) raise(ErrorCode::kShapeError, "scores and labels differ in length");
  check_binary(labels, "labels");
  const auto n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive ranks with tied groups sharing their mean rank. Ranks
  // are doubled so every quantity stays an integer.
  std::int64_t rank_sum2 = 0;
  std::int64_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const auto doubled_mean_rank = static_cast<std::int64_t>(i + 1 + j);  // 2 * (i+1 + j) / 2
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum2 += doubled_mean_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::int64_t negatives = static_cast<std::int64_t>(n) - positives;
  if (positives == 0 || negatives == 0) {
    raise(ErrorCode::kUndefinedAUC, "AUC needs both classes (positives " + std::to_string(positives) +
                                        ", negatives " + std::to_string(negatives) + ")");
  }
  const std::int64_t u2 = rank_sum2 - positives * (positives + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double mcc(const Confusion& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

Scores score(const std::vector<int>& predictions, const std::vector<double>& prob_risky,
             const std::vector<int>& labels) {
  if (labels.empty()) raise(ErrorCode::kEmptyDataset, "cannot score an empty set");
  Scores s;
  s.confusion = confusion(predictions, labels);
  const auto& c = s.confusion;
  s.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  s.mcc = mcc(c);
  s.fpr = c.fp + c.tn == 0 ? 0.0 : static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  s.fnr = c.fn + c.tp == 0 ? 0.0 : static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
  if (c.tp + c.fn > 0 && c.tn + c.fp > 0) s.auc = auc(prob_risky, labels);
  return s;
}

Scores average_folds(const std::vector<Scores>& folds) {
  if (folds.empty()) raise(ErrorCode::kEmptyDataset, "no folds to average");
  Scores out;
  const double k = static_cast<double>(folds.size());
  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (const auto& f : folds) {
    out.accuracy += f.accuracy / k;
    out.mcc += f.mcc / k;
    out.fpr += f.fpr / k;
    out.fnr += f.fnr / k;
    out.confusion.tp += f.confusion.tp;
    out.confusion.tn += f.confusion.tn;
    out.confusion.fp += f.confusion.fp;
    out.confusion.fn += f.confusion.fn;
    if (f.auc) {
      auc_sum += *f.auc;
      ++auc_count;
    }
    Scores flat = f;
    flat.per_fold.clear();
    out.per_fold.push_back(std::move(flat));
  }
  if (auc_count > 0) out.auc = auc_sum / static_cast<double>(auc_count);
  return out;
}

std::string scores_to_json(const Scores& s, bool include_folds) { return to_json(s, include_folds).dump(); }

}  // namespace roadgraph
