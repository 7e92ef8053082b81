#include <gtest/gtest.h>

#include "dermveil/error.hpp"
#include "dermveil/metrics.hpp"
#include "dermveil/rng.hpp"

using namespace dermveil;

TEST(Metrics, PerfectPredictions) {
  const std::vector<int> y = {1, 0, 1, 0};
  const MetricsReport r = confusion(y, y, 1);
  EXPECT_EQ(*r.sensitivity, 1.0);
  EXPECT_EQ(*r.specificity, 1.0);
  EXPECT_TRUE(r.flags.empty());
}

TEST(Metrics, AllNegativeWithFortyPercentPositive) {
  const std::vector<int> actual = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  const std::vector<int> pred(10, 0);
  const MetricsReport r = confusion(pred, actual, 1);
  EXPECT_EQ(*r.sensitivity, 0.0);
  EXPECT_EQ(*r.specificity, 1.0);
  EXPECT_DOUBLE_EQ(*r.accuracy, 0.6);
}

TEST(Metrics, HandCountedTenRows) {
  const std::vector<int> actual = {1, 1, 1, 0, 0, 0, 0, 1, 0, 1};
  const std::vector<int> pred = {1, 0, 1, 0, 1, 0, 0, 1, 0, 0};
  const MetricsReport r = confusion(pred, actual, 1);
  EXPECT_EQ(r.tp, 3u);
  EXPECT_EQ(r.fn, 2u);
  EXPECT_EQ(r.tn, 4u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_DOUBLE_EQ(*r.sensitivity, 0.6);
  EXPECT_DOUBLE_EQ(*r.specificity, 0.8);
  EXPECT_DOUBLE_EQ(*r.accuracy, 0.7);
}

TEST(Metrics, UndefinedRatesAreFlagged) {
  const std::vector<int> actual = {0, 0, 0};
  const MetricsReport r = confusion(std::vector<int>{0, 1, 0}, actual, 1);
  EXPECT_FALSE(r.sensitivity.has_value());
  EXPECT_EQ(r.flags, (std::vector<std::string>{"sensitivity_undefined"}));
  const std::string json = metrics_to_json(r);
  EXPECT_NE(json.find("\"sensitivity\": null"), std::string::npos);
  EXPECT_THROW(confusion(std::vector<int>{1}, std::vector<int>{1, 0}, 1), Error);
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}, 1), Error);
}

TEST(Metrics, SwappingPositiveSwapsRates) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> a(50), p(50);
    for (int i = 0; i < 50; ++i) {
      a[i] = static_cast<int>(rng.below(2));
      p[i] = static_cast<int>(rng.below(2));
    }
    const MetricsReport one = confusion(p, a, 1);
    const MetricsReport zero = confusion(p, a, 0);
    EXPECT_EQ(one.total(), 50u);
    EXPECT_EQ(one.sensitivity, zero.specificity);
    EXPECT_EQ(one.specificity, zero.sensitivity);
    EXPECT_EQ(one.accuracy, zero.accuracy);
  }
}

TEST(Metrics, PoolingSumsCounts) {
  const MetricsReport a = metrics_from_counts(1, 2, 3, 4);
  const MetricsReport b = metrics_from_counts(5, 0, 1, 0);
  const MetricsReport p = pool(std::vector<MetricsReport>{a, b});
  EXPECT_EQ(p.tp, 6u);
  EXPECT_EQ(p.fn, 4u);
  EXPECT_DOUBLE_EQ(*p.sensitivity, 0.6);
}
