#include "capire/experiment.hpp"

#include <algorithm>

#include <json.hpp>

#include "capire/csv.hpp"
#include "capire/errors.hpp"

namespace capire {

namespace {

using Json = nlohmann::ordered_json;

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  auto line = [&](const std::vector<std::string>& cells, bool is_header) {
    std::string out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out += "  ";
      const std::string pad(width[c] - cells[c].size(), ' ');
      const bool numeric = !cells[c].empty() && cells[c].find_first_not_of("0123456789.-+e") == std::string::npos;
      out += (is_header || !numeric) ? cells[c] + pad : pad + cells[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header, true);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& row : rows) out += line(row, false);
  return out;
}

std::string num(double v) { return csv::fixed(v, 6); }

Json row_json(const ComparisonRow& r) {
  Json j;
  j["configuration"] = r.configuration;
  j["num_features"] = r.num_features;
  j["auc"] = r.auc;
  j["accuracy"] = r.accuracy;
  j["f1"] = r.f1;
  j["balanced_accuracy"] = r.balanced_accuracy;
  j["train_accuracy"] = r.train_accuracy;
  return j;
}

/// Full 34-column dataset in canonical column order.
Dataset canonical_dataset(const FeatureMatrix& matrix) {
  const auto full = matrix.dataset();
  const auto columns = all_feature_columns();
  for (const auto& name : columns) {
    if (std::find(matrix.columns.begin(), matrix.columns.end(), name) == matrix.columns.end()) {
      throw ValidationError("feature matrix lacks column '" + name + "'");
    }
  }
  return full.select_columns(columns);
}

struct Scored {
  ComparisonRow row;
  ForestModel model;
};

Scored fit_and_score(const std::string& name, const Dataset& train_set, const Dataset& test_set,
                     const ExperimentConfig& config) {
  ForestConfig forest = config.forest;
  forest.seed = config.seed;
  auto model = train(train_set, forest, config.threads);
  const auto test_scores = model.predict_proba(test_set);
  const auto test_metrics = evaluate(test_scores, test_set.labels());
  const auto train_scores = model.predict_proba(train_set);
  const auto train_metrics = evaluate(train_scores, train_set.labels());
  ComparisonRow row;
  row.configuration = name;
  row.num_features = train_set.cols();
  row.auc = test_metrics.auc.value();
  row.accuracy = test_metrics.accuracy;
  row.f1 = test_metrics.f1;
  row.balanced_accuracy = test_metrics.balanced_accuracy;
  row.train_accuracy = train_metrics.accuracy;
  return {row, std::move(model)};
}

}  // namespace

SplitIndices experiment_split(const FeatureMatrix& matrix, const ExperimentConfig& config) {
  try {
    return stratified_split(matrix.labels, config.train_fraction, config.seed);
  } catch (const ValidationError& e) {
    throw ValidationError("degenerate split for seed " + std::to_string(config.seed) + ": " + e.what());
  }
}

ComparisonReport run_comparison(const FeatureMatrix& matrix, const ExperimentConfig& config) {
  const auto data = canonical_dataset(matrix);
  const auto split = experiment_split(matrix, config);
  const auto train_full = data.select_rows(split.train);
  const auto test_full = data.select_rows(split.test);
  const auto base_cols = baseline_columns();

  ComparisonReport report;
  report.seed = config.seed;
  report.train_rows = split.train.size();
  report.test_rows = split.test.size();
  auto base = fit_and_score(kBaselineConfiguration, train_full.select_columns(base_cols),
                            test_full.select_columns(base_cols), config);
  auto full = fit_and_score(kStructuralConfiguration, train_full, test_full, config);
  report.rows = {base.row, full.row};
  report.models.push_back(std::move(base.model));
  report.models.push_back(std::move(full.model));
  return report;
}

AblationReport run_ablation(const FeatureMatrix& matrix, const ExperimentConfig& config) {
  const auto data = canonical_dataset(matrix);
  const auto split = experiment_split(matrix, config);
  const auto train_full = data.select_rows(split.train);
  const auto test_full = data.select_rows(split.test);

  AblationReport report;
  report.seed = config.seed;
  report.full = fit_and_score(kStructuralConfiguration, train_full, test_full, config).row;
  auto names = structural_columns();
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    const auto ablated =
        fit_and_score("without " + name, train_full.drop_column(name), test_full.drop_column(name), config).row;
    report.rows.push_back({name, report.full.auc - ablated.auc, report.full.accuracy - ablated.accuracy,
                           report.full.balanced_accuracy - ablated.balanced_accuracy, report.full.f1 - ablated.f1});
  }
  return report;
}

ImportanceReport report_importance(const ForestModel& model, std::size_t top_k) {
  ImportanceReport report;
  const auto ranked = feature_importance(model);
  report.total_features = ranked.size();
  const std::size_t keep = top_k == 0 ? ranked.size() : std::min(top_k, ranked.size());
  for (std::size_t i = 0; i < keep; ++i) {
    report.rows.push_back({i + 1, ranked[i].name, ranked[i].importance, is_structural_column(ranked[i].name)});
  }
  return report;
}

std::string ComparisonReport::to_json() const {
  Json j;
  j["seed"] = seed;
  j["train_rows"] = train_rows;
  j["test_rows"] = test_rows;
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(row_json(r));
  j["configurations"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string ComparisonReport::to_table() const {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.configuration, std::to_string(r.num_features), num(r.auc), num(r.accuracy), num(r.f1),
                     num(r.balanced_accuracy), num(r.train_accuracy)});
  }
  return render_table({"configuration", "num_features", "auc", "accuracy", "f1", "balanced_accuracy", "train_accuracy"},
                      cells);
}

std::string AblationReport::to_json() const {
  Json j;
  j["seed"] = seed;
  j["full_model"] = row_json(full);
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json e;
    e["feature"] = r.feature;
    e["delta_auc"] = r.delta_auc;
    e["delta_accuracy"] = r.delta_accuracy;
    e["delta_balanced_accuracy"] = r.delta_balanced_accuracy;
    e["delta_f1"] = r.delta_f1;
    arr.push_back(std::move(e));
  }
  j["ablations"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string AblationReport::to_table() const {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.feature, num(r.delta_auc), num(r.delta_accuracy), num(r.delta_balanced_accuracy),
                     num(r.delta_f1)});
  }
  return render_table({"removed_feature", "delta_auc", "delta_accuracy", "delta_balanced_accuracy", "delta_f1"},
                      cells);
}

std::string AblationReport::to_long_csv() const {
  std::string out = "feature,metric,delta\n";
  for (const auto& r : rows) {
    out += r.feature + ",auc," + num(r.delta_auc) + "\n";
    out += r.feature + ",accuracy," + num(r.delta_accuracy) + "\n";
    out += r.feature + ",balanced_accuracy," + num(r.delta_balanced_accuracy) + "\n";
    out += r.feature + ",f1," + num(r.delta_f1) + "\n";
  }
  return out;
}

std::string ImportanceReport::to_json() const {
  Json j;
  j["total_features"] = total_features;
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json e;
    e["rank"] = r.rank;
    e["feature"] = r.feature;
    e["importance"] = r.importance;
    e["is_structural"] = r.is_structural;
    arr.push_back(std::move(e));
  }
  j["features"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::string ImportanceReport::to_table() const {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.rank), r.feature, num(r.importance), r.is_structural ? "yes" : "no"});
  }
  return render_table({"rank", "feature", "importance", "is_structural"}, cells);
}

}  // namespace capire
