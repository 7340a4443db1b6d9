#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "capire/errors.hpp"
#include "capire/forest.hpp"
#include "capire/rng.hpp"

namespace capire {
namespace {

/// Distinct rows, labels from a noisy threshold on the first two features.
Dataset random_dataset(std::uint64_t seed, std::size_t rows, std::size_t cols, double noise = 0.2) {
  Rng rng(seed);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < cols; ++c) names.push_back("f" + std::to_string(c));
  std::vector<double> values;
  std::vector<int> labels;
  for (std::size_t r = 0; r < rows; ++r) {
    double signal = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = uniform01(rng);
      values.push_back(x);
      if (c < 2) signal += x;
    }
    labels.push_back((signal > 1.0) != bernoulli(rng, noise) ? 1 : 0);
  }
  return Dataset(names, values, labels);
}

double train_accuracy(const ForestModel& model, const Dataset& data) {
  const auto p = model.predict_proba(data);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hits += ((p[i] >= 0.5) == (data.labels()[i] == 1)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(p.size());
}

DecisionTree::Node split(int feature, double threshold, int left, int right, double weight, double positive) {
  return {feature, threshold, left, right, positive / weight, weight, gini_impurity(positive, weight)};
}

DecisionTree::Node leaf(double weight, double positive) { return split(-1, 0.0, -1, -1, weight, positive); }

TEST(Gini, BinaryValues) {
  EXPECT_EQ(gini_impurity(0.0, 4.0), 0.0);
  EXPECT_EQ(gini_impurity(4.0, 4.0), 0.0);
  EXPECT_EQ(gini_impurity(2.0, 4.0), 0.5);
  EXPECT_EQ(gini_impurity(1.0, 4.0), 0.375);
  EXPECT_EQ(gini_impurity(0.0, 0.0), 0.0);
}

TEST(Mdi, HandComputedTrees) {
  // Tree 1: root (w 4, 1 positive) on f0 -> [w 2, 1 pos] split on f1 into pure leaves, and a pure leaf.
  //   f0: (4 * 0.375 - 2 * 0.5) / 4 = 0.125; f1: (2 * 0.5) / 4 = 0.25.
  // Tree 2: root (w 2, 1 positive) on f0 into pure leaves: f0 = 0.5.
  DecisionTree t1{{split(0, 0.5, 1, 2, 4, 1), split(1, 0.5, 3, 4, 2, 1), leaf(2, 0), leaf(1, 1), leaf(1, 0)}};
  DecisionTree t2{{split(0, 0.5, 1, 2, 2, 1), leaf(1, 0), leaf(1, 1)}};
  const auto imp = mdi_importances({t1, t2}, 3);
  EXPECT_NEAR(imp[0], 5.0 / 7.0, 1e-15);
  EXPECT_NEAR(imp[1], 2.0 / 7.0, 1e-15);
  EXPECT_EQ(imp[2], 0.0);

  const ForestModel model({}, {"a", "b", "c"}, {t1, t2});
  const auto ranked = feature_importance(model);
  EXPECT_EQ(ranked[0].name, "a");
  EXPECT_EQ(ranked[1].name, "b");
  EXPECT_EQ(ranked[2].name, "c");
}

TEST(Mdi, NoSplitsGiveZeros) {
  const auto imp = mdi_importances({DecisionTree{{leaf(3, 1)}}}, 2);
  EXPECT_EQ(imp, (std::vector<double>{0.0, 0.0}));
}

TEST(Mdi, TiesRankByName) {
  DecisionTree t{{split(1, 0.5, 1, 2, 2, 1), leaf(1, 0), leaf(1, 1)}};
  DecisionTree u{{split(0, 0.5, 1, 2, 2, 1), leaf(1, 0), leaf(1, 1)}};
  const ForestModel model({}, {"zeta", "alpha"}, {t, u});
  const auto ranked = feature_importance(model);
  EXPECT_EQ(ranked[0].name, "alpha");
  EXPECT_EQ(ranked[1].name, "zeta");
}

TEST(ForestModel, RejectsMalformedTrees) {
  EXPECT_THROW(ForestModel({}, {"a"}, {DecisionTree{}}), ValidationError);
  EXPECT_THROW(ForestModel({}, {"a"}, {DecisionTree{{split(3, 0.5, 1, 2, 2, 1), leaf(1, 0), leaf(1, 1)}}}),
               ValidationError);
  EXPECT_THROW(ForestModel({}, {"a"}, {DecisionTree{{split(0, 0.5, 1, 5, 2, 1), leaf(1, 0)}}}), ValidationError);
}

TEST(Dataset, SelectionAndValidation) {
  const Dataset d({"a", "b", "c"}, {1, 2, 3, 4, 5, 6}, {0, 1});
  EXPECT_EQ(d.select_rows(std::vector<std::size_t>{1}).at(0, 2), 6.0);
  const std::vector<std::string> cols{"c", "a"};
  const auto s = d.select_columns(cols);
  EXPECT_EQ(s.feature_names(), cols);
  EXPECT_EQ(s.at(1, 1), 4.0);
  EXPECT_EQ(d.drop_column("b").feature_names(), (std::vector<std::string>{"a", "c"}));
  EXPECT_THROW(d.drop_column("z"), ValidationError);
  EXPECT_THROW(d.select_columns(std::vector<std::string>{"z"}), ValidationError);
  EXPECT_THROW(Dataset({"a"}, {1, 2, 3}, {0, 1}), ValidationError);
  EXPECT_THROW(Dataset({"a"}, {1, 2}, {0, 2}), ValidationError);
  EXPECT_THROW(Dataset({"a"}, {1, NAN}, {0, 1}), ValidationError);
  EXPECT_THROW(Dataset({"a"}, {1, 2}, {1, 1}).require_trainable(), ValidationError);
}

TEST(ForestConfig, Validation) {
  ForestConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_trees = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.min_samples_split = 1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.max_depth = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_EQ(MaxFeatures::sqrt().resolve(34), 5u);
  EXPECT_EQ(MaxFeatures::sqrt().resolve(25), 5u);
  EXPECT_EQ(MaxFeatures::sqrt().resolve(1), 1u);
  EXPECT_EQ(MaxFeatures::all().resolve(9), 9u);
  EXPECT_EQ(MaxFeatures::fixed(50).resolve(9), 9u);
}

TEST(Train, SingleTreeFitsMidpointThreshold) {
  const Dataset d({"x"}, {1.0, 3.0}, {0, 1});
  ForestConfig c;
  c.n_trees = 1;
  c.bootstrap = false;
  const auto model = train(d, c);
  const auto& root = model.trees()[0].nodes[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_EQ(root.threshold, 2.0);
  EXPECT_EQ(model.predict_proba(std::vector<double>{1.5}), 0.0);
  EXPECT_EQ(model.predict_proba(std::vector<double>{2.5}), 1.0);
}

TEST(Train, SplitTiesGoToLowerFeature) {
  const Dataset d({"x", "copy"}, {0, 0, 1, 1, 2, 2, 3, 3}, {0, 0, 1, 1});
  ForestConfig c;
  c.n_trees = 5;
  c.max_features = MaxFeatures::all();
  const auto model = train(d, c);
  EXPECT_EQ(model.importances()[0], 1.0);
  EXPECT_EQ(model.importances()[1], 0.0);
}

TEST(Train, BalancedWeightsEqualiseRoot) {
  const auto d = random_dataset(3, 100, 3, 0.0);
  const auto positives = static_cast<double>(std::count(d.labels().begin(), d.labels().end(), 1));
  ForestConfig c;
  c.n_trees = 1;
  c.bootstrap = false;
  const auto balanced = train(d, c).trees()[0].nodes[0];
  EXPECT_NEAR(balanced.value, 0.5, 1e-12);
  EXPECT_NEAR(balanced.weight, 100.0, 1e-9);
  c.class_weight = ClassWeight::None;
  const auto plain = train(d, c).trees()[0].nodes[0];
  EXPECT_NEAR(plain.value, positives / 100.0, 1e-12);
}

TEST(Train, UnlimitedDepthMemorisesConflictFreeData) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = random_dataset(seed, 200, 5, 0.3);
    ForestConfig c;
    c.seed = seed;
    EXPECT_EQ(train_accuracy(train(d, c), d), 1.0);
  }
}

TEST(Train, DepthAndSplitLimits) {
  const auto d = random_dataset(4, 150, 4);
  ForestConfig c;
  c.n_trees = 20;
  c.max_depth = 2;
  const auto shallow = train(d, c);
  for (const auto& t : shallow.trees()) EXPECT_LE(t.depth(), 2u);
  c.max_depth.reset();
  c.min_samples_split = 100000;
  const auto stumps = train(d, c);
  for (const auto& t : stumps.trees()) EXPECT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(stumps.importances(), std::vector<double>(4, 0.0));
}

TEST(Train, ConstantColumnsAreNeverUsed) {
  auto base = random_dataset(5, 120, 3);
  std::vector<double> values;
  for (std::size_t r = 0; r < base.rows(); ++r) {
    for (double x : base.row(r)) values.push_back(x);
    values.push_back(7.0);
  }
  const Dataset d({"f0", "f1", "f2", "flat"}, values, base.labels());
  ForestConfig c;
  c.n_trees = 30;
  c.seed = 9;
  const auto with_flat = train(d, c);
  EXPECT_EQ(with_flat.importances()[3], 0.0);
  const auto without = train(base, c);
  EXPECT_EQ(with_flat.predict_proba(d), without.predict_proba(base));
}

TEST(Train, DeterministicAcrossThreads) {
  const auto d = random_dataset(6, 200, 6);
  ForestConfig c;
  c.n_trees = 40;
  c.seed = 77;
  const auto one = train(d, c, 1);
  EXPECT_EQ(one, train(d, c, 1));
  EXPECT_EQ(one, train(d, c, 3));
  EXPECT_EQ(one, train(d, c, 8));
  c.seed = 78;
  EXPECT_FALSE(one == train(d, c, 1));
}

TEST(Train, JsonRoundTrip) {
  const auto d = random_dataset(7, 100, 4);
  ForestConfig c;
  c.n_trees = 10;
  c.max_depth = 6;
  c.class_weight = ClassWeight::None;
  c.max_features = MaxFeatures::fixed(2);
  const auto model = train(d, c);
  const auto back = ForestModel::from_json(model.to_json());
  EXPECT_EQ(back, model);
  EXPECT_EQ(back.predict_proba(d), model.predict_proba(d));
  EXPECT_EQ(back.importances(), model.importances());
  EXPECT_EQ(back.config().max_depth, 6u);
  EXPECT_THROW(ForestModel::from_json("{}"), ValidationError);
  EXPECT_THROW(ForestModel::from_json("not json"), ValidationError);
}

TEST(Train, PredictionShapeChecks) {
  const auto d = random_dataset(8, 50, 3);
  ForestConfig c;
  c.n_trees = 3;
  const auto model = train(d, c);
  EXPECT_THROW(model.predict_proba(std::vector<double>{1.0}), ValidationError);
  EXPECT_THROW(model.predict_proba(d.drop_column("f1")), ValidationError);
  for (double p : model.predict_proba(d)) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(TrainProperty, ImportancesFormADistribution) {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto d = random_dataset(seed, 80, 5);
    ForestConfig c;
    c.n_trees = 15;
    c.seed = seed;
    const auto imp = train(d, c).importances();
    double sum = 0.0;
    for (double v : imp) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace capire
