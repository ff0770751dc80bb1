#include "metric_oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace metric_oracle {

double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::int64_t twice_wins = 0, pos = 0, neg = 0;
  for (int y : labels) (y == 1 ? pos : neg)++;
  if (pos == 0 || neg == 0) throw std::invalid_argument("single class");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j]) twice_wins += 2;
      if (scores[i] == scores[j]) twice_wins += 1;
    }
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double direct_mcc(std::int64_t tp, std::int64_t tn, std::int64_t fp, std::int64_t fn) {
  const double a = static_cast<double>(tp), b = static_cast<double>(tn);
  const double c = static_cast<double>(fp), d = static_cast<double>(fn);
  const double denom = (a + c) * (a + d) * (b + c) * (b + d);
  if (denom == 0.0) return 0.0;
  return (a * b - c * d) / std::sqrt(denom);
}

double pearson_binary(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0 || vb == 0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace metric_oracle
