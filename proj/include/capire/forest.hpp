#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace capire {

/// Dense real-valued design matrix with binary labels (1 = dropout).
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> feature_names, std::vector<double> values, std::vector<int> labels);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<int>& labels() const { return labels_; }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }

  Dataset select_rows(std::span<const std::size_t> rows) const;
  /// Keeps the named columns in the given order; throws ValidationError on unknown names.
  Dataset select_columns(std::span<const std::string> names) const;
  Dataset drop_column(std::string_view name) const;

  /// Throws ValidationError unless there are >= 2 rows and both classes.
  void require_trainable() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::vector<int> labels_;
};

enum class ClassWeight { Balanced, None };

/// Number of candidate features tried per node.
struct MaxFeatures {
  enum class Rule { Sqrt, All, Fixed };
  Rule rule = Rule::Sqrt;
  std::size_t count = 0;  // for Rule::Fixed

  static MaxFeatures sqrt() { return {}; }
  static MaxFeatures all() { return {Rule::All, 0}; }
  static MaxFeatures fixed(std::size_t n) { return {Rule::Fixed, n}; }
  std::size_t resolve(std::size_t features) const;
};

struct ForestConfig {
  std::size_t n_trees = 500;
  std::optional<std::size_t> max_depth;  // unlimited when empty
  std::size_t min_samples_split = 2;
  ClassWeight class_weight = ClassWeight::Balanced;
  MaxFeatures max_features;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Flattened binary tree. Leaves have feature == -1; rows with
/// x[feature] <= threshold go left.
struct DecisionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;     // weighted positive-class fraction
    double weight = 0.0;    // total sample weight reaching the node
    double impurity = 0.0;  // weighted Gini
  };
  std::vector<Node> nodes;

  double predict(std::span<const double> row) const;
  std::size_t depth() const;
};

/// Binary Gini impurity from weighted class totals.
inline double gini_impurity(double positive_weight, double total_weight) {
  if (total_weight <= 0.0) return 0.0;
  const double p = positive_weight / total_weight;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

class ForestModel {
 public:
  ForestModel(ForestConfig config, std::vector<std::string> feature_names, std::vector<DecisionTree> trees);

  const ForestConfig& config() const { return config_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  /// Per-feature MDI in column order; sums to 1 unless no tree ever split.
  const std::vector<double>& importances() const { return importances_; }

  /// Mean over trees of the leaf positive fraction. Throws ValidationError on width mismatch.
  double predict_proba(std::span<const double> row) const;
  std::vector<double> predict_proba(const Dataset& data) const;

  std::string to_json() const;
  static ForestModel from_json(std::string_view text);

  friend bool operator==(const ForestModel& a, const ForestModel& b) { return a.to_json() == b.to_json(); }

 private:
  ForestConfig config_;
  std::vector<std::string> names_;
  std::vector<DecisionTree> trees_;
  std::vector<double> importances_;
};

/// Grows `config.n_trees` CART trees. Tree i draws its bootstrap and feature
/// candidates from substream i of `config.seed`, so `threads` never changes the
/// model. Columns constant over the whole training set are never candidates.
/// Throws ValidationError for single-class data or an invalid config.
ForestModel train(const Dataset& data, const ForestConfig& config, unsigned threads = 1);

/// MDI per split node: (w_node * gini_node - w_left * gini_left -
/// w_right * gini_right) / w_root, summed per tree and averaged over trees,
/// then normalised to sum 1.
std::vector<double> mdi_importances(const std::vector<DecisionTree>& trees, std::size_t features);

struct NamedImportance {
  std::string name;
  double importance = 0.0;
};

/// Descending by importance, ties by name.
std::vector<NamedImportance> feature_importance(const ForestModel& model);

}  // namespace capire
