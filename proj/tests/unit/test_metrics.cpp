#include <gtest/gtest.h>

#include <cmath>

#include "metric_oracles.hpp"
#include "roadgraph/error.hpp"
#include "roadgraph/metrics.hpp"
#include "roadgraph/random.hpp"

using namespace roadgraph;

TEST(Auc, SpecCases) {
  EXPECT_EQ(auc({0.9, 0.2}, {1, 0}), 1.0);
  EXPECT_EQ(auc({0.5, 0.5}, {1, 0}), 0.5);
  EXPECT_EQ(auc({0.1, 0.8}, {1, 0}), 0.0);
  try {
    auc({0.1, 0.2}, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedAUC);
  }
}

TEST(Auc, MatchesPairwiseOracle) {
  Rng rng(21);
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<double> s(20);
    std::vector<int> y(20);
    for (int i = 0; i < 20; ++i) {
      s[i] = std::round(rng.uniform() * 8) / 8;
      y[i] = rng.uniform() < 0.5;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(auc(s, y), metric_oracle::pairwise_auc(s, y));
  }
}

TEST(Mcc, SpecCases) {
  EXPECT_EQ(mcc({5, 5, 0, 0}), 1.0);
  EXPECT_EQ(mcc({1, 1, 1, 1}), 0.0);
  EXPECT_EQ(mcc({0, 0, 4, 6}), -1.0);
  EXPECT_EQ(mcc({3, 0, 2, 0}), 0.0);
}

TEST(Mcc, MatchesPearson) {
  Rng rng(4);
  for (int inst = 0; inst < 30; ++inst) {
    std::vector<int> pred(40), lab(40);
    for (int i = 0; i < 40; ++i) {
      pred[i] = rng.uniform() < 0.5;
      lab[i] = rng.uniform() < 0.5;
    }
    EXPECT_NEAR(mcc(confusion(pred, lab)), metric_oracle::pearson_binary(pred, lab), 1e-12);
  }
}

TEST(Score, PerfectAndConstant) {
  const std::vector<int> y{0, 1, 0, 1};
  const auto perfect = score(y, {0.1, 0.9, 0.2, 0.8}, y);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.mcc, 1.0);
  EXPECT_EQ(perfect.auc, 1.0);
  EXPECT_EQ(perfect.fpr, 0.0);
  EXPECT_EQ(perfect.fnr, 0.0);
  const auto constant = score({1, 1, 1, 1}, {0.6, 0.6, 0.6, 0.6}, y);
  EXPECT_EQ(constant.accuracy, 0.5);
  EXPECT_EQ(constant.mcc, 0.0);
  EXPECT_EQ(constant.auc, 0.5);
  EXPECT_EQ(constant.fpr, 1.0);
  EXPECT_EQ(constant.fnr, 0.0);
  const auto single = score({1, 1}, {0.6, 0.7}, {1, 1});
  EXPECT_FALSE(single.auc.has_value());
  EXPECT_THROW(score({}, {}, {}), Error);
}

TEST(Score, FoldAverage) {
  const auto a = score({1, 0}, {0.9, 0.1}, {1, 0});
  const auto b = score({1, 1}, {0.9, 0.8}, {1, 0});
  const auto m = average_folds({a, b});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  EXPECT_EQ(m.per_fold.size(), 2u);
  EXPECT_EQ(m.confusion.total(), 4);
  const auto json = scores_to_json(m);
  EXPECT_LT(json.find("\"accuracy\""), json.find("\"auc\""));
  EXPECT_NE(json.find("per_fold"), std::string::npos);
}
