#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "capire/evaluation.hpp"
#include "support/oracles.hpp"

namespace capire {
namespace {

std::vector<int> labels_with(std::size_t negatives, std::size_t positives, std::uint64_t seed) {
  std::vector<int> out(negatives, 0);
  out.insert(out.end(), positives, 1);
  Rng rng(seed);
  shuffle(out, rng);
  return out;
}

TEST(Metrics, HandComputedConfusion) {
  const Confusion c{.tp = 4, .fp = 2, .tn = 3, .fn = 1};
  const auto m = metrics_from_confusion(c);
  EXPECT_NEAR(m.accuracy, 0.7, 1e-12);
  EXPECT_NEAR(m.balanced_accuracy, 0.7, 1e-12);
  EXPECT_NEAR(m.f1, 16.0 / 22.0, 1e-12);
  EXPECT_NEAR(m.f1, 0.7273, 5e-5);
}

TEST(Metrics, ThresholdIsInclusive) {
  const std::vector<double> scores{0.5, 0.49, 0.9, 0.1};
  const std::vector<int> labels{1, 1, 0, 0};
  const auto c = confusion_at(scores, labels, 0.5);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.tn, 1u);
}

TEST(Metrics, EmptyDenominatorsGiveZero) {
  const auto m = metrics_from_confusion({.tp = 0, .fp = 0, .tn = 5, .fn = 0});
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.balanced_accuracy, 0.5);
}

TEST(Metrics, EvaluateSkipsAucForOneClass) {
  const std::vector<double> scores{0.2, 0.7};
  EXPECT_FALSE(evaluate(scores, std::vector<int>{1, 1}).auc.has_value());
  EXPECT_EQ(evaluate(scores, std::vector<int>{0, 1}).auc, 1.0);
  EXPECT_THROW(roc_auc(scores, std::vector<int>{0, 0}), ValidationError);
  EXPECT_THROW(evaluate(scores, std::vector<int>{0}), ValidationError);
  EXPECT_THROW(evaluate(scores, std::vector<int>{0, 3}), ValidationError);
}

TEST(Auc, KnownOrderings) {
  const std::vector<int> labels{0, 0, 1, 1};
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.2, 0.3, 0.4}, labels), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.4, 0.3, 0.2, 0.1}, labels), 0.0);
  EXPECT_EQ(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, labels), 0.5);
  EXPECT_EQ(roc_auc(std::vector<double>{0.1, 0.3, 0.2, 0.4}, labels), 0.75);
}

TEST(AucProperty, EqualsPairwiseCount) {
  Rng rng(51);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 60);
    const std::uint64_t levels = 1 + uniform_index(rng, 10);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = trial % 2 ? uniform01(rng) : static_cast<double>(uniform_index(rng, levels)) / 10.0;
      labels[i] = bernoulli(rng, 0.4) ? 1 : 0;
    }
    labels[0] = 0;
    labels[1] = 1;
    EXPECT_EQ(roc_auc(scores, labels), oracle::mann_whitney(scores, labels));
  }
}

TEST(StratifiedSplit, Sizes) {
  const auto ten = stratified_split(labels_with(5, 5, 1), 0.8, 3);
  EXPECT_EQ(ten.train.size(), 8u);
  EXPECT_EQ(ten.test.size(), 2u);

  const auto labels = labels_with(653, 168, 2);
  const auto big = stratified_split(labels, 0.8, 4);
  EXPECT_EQ(big.train.size(), 656u);
  EXPECT_EQ(big.test.size(), 165u);
  std::size_t train_pos = 0;
  for (auto i : big.train) train_pos += labels[i] == 1 ? 1 : 0;
  EXPECT_EQ(train_pos, 134u);
}

TEST(StratifiedSplit, EveryClassInBothPartitions) {
  const auto labels = labels_with(2, 40, 5);
  for (double f : {0.05, 0.5, 0.95}) {
    const auto s = stratified_split(labels, f, 7);
    int train_neg = 0, test_neg = 0;
    for (auto i : s.train) train_neg += labels[i] == 0;
    for (auto i : s.test) test_neg += labels[i] == 0;
    EXPECT_EQ(train_neg, 1);
    EXPECT_EQ(test_neg, 1);
  }
}

TEST(StratifiedSplit, Errors) {
  EXPECT_THROW(stratified_split(labels_with(1, 9, 1), 0.8, 0), ValidationError);
  EXPECT_THROW(stratified_split(labels_with(5, 5, 1), 1.0, 0), ValidationError);
  EXPECT_THROW(stratified_split(labels_with(5, 5, 1), 0.0, 0), ValidationError);
  EXPECT_THROW(stratified_split(std::vector<int>{0, 0, 1, 1, 2}, 0.5, 0), ValidationError);
}

TEST(StratifiedSplitProperty, PartitionPreservesProportions) {
  Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t neg = 2 + uniform_index(rng, 200), pos = 2 + uniform_index(rng, 100);
    const auto labels = labels_with(neg, pos, trial);
    const double f = 0.1 + 0.8 * uniform01(rng);
    const auto s = stratified_split(labels, f, trial);

    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));

    std::size_t train_pos = 0;
    for (auto i : s.train) train_pos += labels[i];
    const double exact_pos = static_cast<double>(pos) * f;
    EXPECT_LE(std::abs(static_cast<double>(train_pos) - exact_pos), 1.0 + 1e-9);
    const double target = std::floor(static_cast<double>(neg + pos) * f);
    EXPECT_LE(std::abs(static_cast<double>(s.train.size()) - target), 2.0);  // per-class clamping

    const auto again = stratified_split(labels, f, trial);
    EXPECT_EQ(again.train, s.train);
  }
}

TEST(StratifiedSplitProperty, SeedChangesMembership) {
  const auto labels = labels_with(100, 50, 9);
  EXPECT_NE(stratified_split(labels, 0.8, 1).train, stratified_split(labels, 0.8, 2).train);
}

}  // namespace
}  // namespace capire
