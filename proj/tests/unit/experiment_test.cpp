#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "capire/experiment.hpp"
#include "capire/synth.hpp"

namespace capire {
namespace {

struct Pipeline {
  SynthParams params;
  std::unique_ptr<CurriculumGraph> graph;
  SynthCohort cohort;
  std::unique_ptr<StudentSemesterPanel> panel;
  std::unique_ptr<StructuralModel> model;
  FeatureMatrix matrix;

  explicit Pipeline(std::uint64_t seed, std::size_t students = 400, BottleneckCriteria criteria = {}) {
    params.seed = seed;
    params.n_students = students;
    graph = std::make_unique<CurriculumGraph>(CurriculumGraph::build(generate_curriculum(params)));
    cohort = generate_cohort(*graph, params);
    panel = std::make_unique<StudentSemesterPanel>(build_panel(cohort.records, cohort.profiles, *graph));
    model = std::make_unique<StructuralModel>(StructuralModel::from_graph(*graph, criteria));
    FeatureMatrixOptions options;
    options.window_end = params.window_end;
    matrix = build_feature_matrix(*panel, *model, options);
  }
};

ExperimentConfig small_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.forest.n_trees = 40;
  return c;
}

TEST(FeatureColumns, CanonicalOrder) {
  const auto all = all_feature_columns();
  ASSERT_EQ(all.size(), 34u);
  ASSERT_EQ(baseline_columns().size(), 25u);
  ASSERT_EQ(structural_columns().size(), 9u);
  for (std::size_t i = 0; i < 34; ++i) EXPECT_EQ(is_structural_column(all[i]), i >= 25) << all[i];
}

TEST(FeatureMatrix, ShapeAndCsvRoundTrip) {
  const Pipeline p(1, 200);
  const auto& m = p.matrix;
  ASSERT_GT(m.rows(), 50u);
  EXPECT_EQ(m.columns, all_feature_columns());
  EXPECT_EQ(m.values.size(), m.rows() * 34);
  EXPECT_EQ(m.student_ids.size(), m.rows());
  EXPECT_TRUE(std::is_sorted(m.student_ids.begin(), m.student_ids.end()));

  const std::string csv = m.to_csv();
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(header.substr(0, m.columns[0].size()), m.columns[0]);
  EXPECT_EQ(header.substr(header.size() - 6), ",label");
  const auto back = FeatureMatrix::parse_csv(csv);
  EXPECT_EQ(back.columns, m.columns);
  EXPECT_EQ(back.labels, m.labels);
  ASSERT_EQ(back.values.size(), m.values.size());
  for (std::size_t i = 0; i < m.values.size(); ++i) EXPECT_NEAR(back.values[i], m.values[i], 5e-7);
  EXPECT_EQ(back.to_csv(), csv);
}

TEST(FeatureMatrix, ParsingImputesAndValidates) {
  const auto m = FeatureMatrix::parse_csv("a,b,label\n1,,0\n,2.5,1\n");
  EXPECT_EQ(m.missing_imputed, 2u);
  EXPECT_EQ(m.values, (std::vector<double>{1, 0, 0, 2.5}));
  EXPECT_THROW(FeatureMatrix::parse_csv("a,b\n1,2\n"), InputError);
  EXPECT_THROW(FeatureMatrix::parse_csv("a,label\n1,2\n"), InputError);
  EXPECT_THROW(FeatureMatrix::parse_csv("a,label\nx,1\n"), InputError);
}

TEST(FeatureMatrix, FutureRecordsDoNotChangeFeatures) {
  const Pipeline p(2, 150);
  const int ref = 5;
  std::map<std::string, CalendarTerm> entry;
  for (const auto& r : p.cohort.records) {
    auto it = entry.find(r.student_id);
    if (it == entry.end() || r.term < it->second) entry[r.student_id] = r.term;
  }
  std::vector<TrajectoryRecord> truncated;
  for (const auto& r : p.cohort.records)
    if (r.term <= entry.at(r.student_id).plus(ref - 1)) truncated.push_back(r);
  ASSERT_LT(truncated.size(), p.cohort.records.size());

  const auto panel = build_panel(truncated, p.cohort.profiles, *p.graph);
  FeatureMatrixOptions options;
  options.window_end = p.params.window_end;
  const auto m = build_feature_matrix(panel, *p.model, options);
  ASSERT_EQ(m.student_ids, p.matrix.student_ids);
  EXPECT_EQ(m.values, p.matrix.values);
}

TEST(Experiment, ComparisonShape) {
  const Pipeline p(3);
  const auto report = run_comparison(p.matrix, small_config(3));
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].configuration, kBaselineConfiguration);
  EXPECT_EQ(report.rows[0].num_features, 25u);
  EXPECT_EQ(report.rows[1].configuration, kStructuralConfiguration);
  EXPECT_EQ(report.rows[1].num_features, 34u);
  EXPECT_EQ(report.train_rows + report.test_rows, p.matrix.rows());
  EXPECT_EQ(report.models.size(), 2u);
  for (const auto& row : report.rows) {
    for (double v : {row.auc, row.accuracy, row.f1, row.balanced_accuracy, row.train_accuracy}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
  const auto json = nlohmann::json::parse(report.to_json());
  EXPECT_EQ(json["configurations"].size(), 2u);
  for (const char* key : {"configuration", "num_features", "auc", "accuracy", "f1", "balanced_accuracy",
                          "train_accuracy"})
    EXPECT_TRUE(json["configurations"][0].contains(key)) << key;
  const auto table = report.to_table();
  EXPECT_NE(table.find("Baseline + STRUCT"), std::string::npos);
}

TEST(Experiment, ComparisonMatchesDirectTraining) {
  const Pipeline p(4);
  const auto config = small_config(11);
  const auto report = run_comparison(p.matrix, config);
  const auto split = experiment_split(p.matrix, config);
  const Dataset full = p.matrix.dataset();
  const auto train_set = full.select_rows(split.train).select_columns(baseline_columns());
  const auto test_set = full.select_rows(split.test).select_columns(baseline_columns());
  ForestConfig fc = config.forest;
  fc.seed = config.seed;
  const auto model = train(train_set, fc);
  const auto metrics = evaluate(model.predict_proba(test_set), test_set.labels());
  EXPECT_EQ(report.rows[0].auc, *metrics.auc);
  EXPECT_EQ(report.rows[0].accuracy, metrics.accuracy);
  EXPECT_EQ(report.models[0], model);
}

TEST(Experiment, DeterministicAcrossThreads) {
  const Pipeline p(5);
  auto config = small_config(7);
  const auto one = run_comparison(p.matrix, config).to_json();
  config.threads = 3;
  EXPECT_EQ(run_comparison(p.matrix, config).to_json(), one);
  config.threads = 1;
  EXPECT_EQ(run_ablation(p.matrix, config).to_json(), [&] {
    auto c = config;
    c.threads = 4;
    return run_ablation(p.matrix, c).to_json();
  }());
}

TEST(Experiment, AblationRowsAndDeltas) {
  const Pipeline p(6);
  const auto config = small_config(2);
  const auto report = run_ablation(p.matrix, config);
  ASSERT_EQ(report.rows.size(), 9u);
  auto names = structural_columns();
  std::sort(names.begin(), names.end());
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(report.rows[i].feature, names[i]);

  // Recompute one delta by hand.
  const auto split = experiment_split(p.matrix, config);
  const Dataset full = p.matrix.dataset();
  const auto train_set = full.select_rows(split.train).drop_column(names[0]);
  const auto test_set = full.select_rows(split.test).drop_column(names[0]);
  ForestConfig fc = config.forest;
  fc.seed = config.seed;
  const auto ablated = evaluate(train(train_set, fc).predict_proba(test_set), test_set.labels());
  EXPECT_EQ(report.rows[0].delta_auc, report.full.auc - *ablated.auc);
  EXPECT_EQ(report.rows[0].delta_f1, report.full.f1 - ablated.f1);

  const auto long_csv = report.to_long_csv();
  EXPECT_EQ(std::count(long_csv.begin(), long_csv.end(), '\n'), 37);
  EXPECT_EQ(long_csv.substr(0, long_csv.find('\n')), "feature,metric,delta");
}

TEST(Experiment, ConstantColumnAblatesToZero) {
  const Pipeline p(7, 400, {0.9, 1000});
  const auto bar = std::find(p.matrix.columns.begin(), p.matrix.columns.end(), "STRUCT_bottleneck_approval_ratio") -
                   p.matrix.columns.begin();
  for (std::size_t r = 0; r < p.matrix.rows(); ++r) ASSERT_EQ(p.matrix.values[r * 34 + bar], 1.0);
  const auto report = run_ablation(p.matrix, small_config(3));
  const auto row = std::find_if(report.rows.begin(), report.rows.end(),
                                [](const AblationRow& r) { return r.feature == "STRUCT_bottleneck_approval_ratio"; });
  ASSERT_NE(row, report.rows.end());
  EXPECT_EQ(row->delta_auc, 0.0);
  EXPECT_EQ(row->delta_accuracy, 0.0);
  EXPECT_EQ(row->delta_balanced_accuracy, 0.0);
  EXPECT_EQ(row->delta_f1, 0.0);
}

TEST(Experiment, ImportanceReport) {
  const Pipeline p(8);
  const auto comparison = run_comparison(p.matrix, small_config(4));
  const auto all = report_importance(comparison.models[1], 0);
  EXPECT_EQ(all.total_features, 34u);
  ASSERT_EQ(all.rows.size(), 34u);
  for (std::size_t i = 0; i < all.rows.size(); ++i) {
    EXPECT_EQ(all.rows[i].rank, i + 1);
    EXPECT_EQ(all.rows[i].is_structural, is_structural_column(all.rows[i].feature));
    if (i > 0) EXPECT_LE(all.rows[i].importance, all.rows[i - 1].importance);
  }
  const auto top = report_importance(comparison.models[1], 5);
  ASSERT_EQ(top.rows.size(), 5u);
  EXPECT_EQ(top.rows[4].feature, all.rows[4].feature);
  const auto json = nlohmann::json::parse(top.to_json());
  for (const char* key : {"rank", "feature", "importance", "is_structural"})
    EXPECT_TRUE(json["features"][0].contains(key)) << key;
}

TEST(Experiment, DegenerateSplitNamesSeed) {
  FeatureMatrix m;
  m.columns = all_feature_columns();
  for (int r = 0; r < 10; ++r) {
    m.values.insert(m.values.end(), 34, static_cast<double>(r));
    m.labels.push_back(r == 0 ? 1 : 0);
  }
  try {
    run_comparison(m, small_config(42));
    FAIL() << "single-positive matrix accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
  }
}

}  // namespace
}  // namespace capire
