#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capire/evaluation.hpp"
#include "capire/feature_matrix.hpp"
#include "capire/forest.hpp"

namespace capire {

struct ExperimentConfig {
  double train_fraction = 0.8;
  ForestConfig forest;  // forest.seed is overwritten by `seed`
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

inline constexpr const char* kBaselineConfiguration = "Baseline";
inline constexpr const char* kStructuralConfiguration = "Baseline + STRUCT";

struct ComparisonRow {
  std::string configuration;
  std::size_t num_features = 0;
  double auc = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  double balanced_accuracy = 0.0;
  double train_accuracy = 0.0;
};

struct ComparisonReport {
  std::uint64_t seed = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<ComparisonRow> rows;  // baseline first
  /// Trained models in row order; not part of the serialised report.
  std::vector<ForestModel> models;

  std::string to_json() const;
  std::string to_table() const;
};

struct AblationRow {
  std::string feature;
  double delta_auc = 0.0;
  double delta_accuracy = 0.0;
  double delta_balanced_accuracy = 0.0;
  double delta_f1 = 0.0;
};

/// delta = full - ablated, one row per structural column, ordered by name.
struct AblationReport {
  std::uint64_t seed = 0;
  ComparisonRow full;
  std::vector<AblationRow> rows;

  std::string to_json() const;
  std::string to_table() const;
  /// Long format `feature,metric,delta` for heatmaps.
  std::string to_long_csv() const;
};

struct ImportanceRow {
  std::size_t rank = 0;
  std::string feature;
  double importance = 0.0;
  bool is_structural = false;
};

struct ImportanceReport {
  std::size_t total_features = 0;
  std::vector<ImportanceRow> rows;

  std::string to_json() const;
  std::string to_table() const;
};

/// Shared hold-out split for every configuration of one experiment. Throws
/// ValidationError naming the seed when either partition would hold a single class.
SplitIndices experiment_split(const FeatureMatrix& matrix, const ExperimentConfig& config);

/// Trains the 25-column and 34-column models on one split and scores both on
/// the shared test rows.
ComparisonReport run_comparison(const FeatureMatrix& matrix, const ExperimentConfig& config);

/// Retrains the 34-column model without each structural column in turn.
AblationReport run_ablation(const FeatureMatrix& matrix, const ExperimentConfig& config);

/// Descending MDI with structural columns flagged; `top_k` = 0 keeps all rows.
ImportanceReport report_importance(const ForestModel& model, std::size_t top_k = 20);

}  // namespace capire
