#pragma once

#include <cstdint>
#include <vector>

namespace metric_oracle {

// O(n^2) count over every (positive, negative) pair; ties score 1/2.
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Matthews coefficient straight from the four counts; 0 on a zero factor.
double direct_mcc(std::int64_t tp, std::int64_t tn, std::int64_t fp, std::int64_t fn);

// Pearson correlation of two 0/1 vectors, an independent route to MCC.
double pearson_binary(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace metric_oracle
