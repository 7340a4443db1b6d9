#include "capire/feature_matrix.hpp"

#include "capire/baseline_features.hpp"
#include "capire/csv.hpp"
#include "capire/errors.hpp"

namespace capire {

std::vector<std::string> baseline_columns() {
  return {kBaselineFeatureNames.begin(), kBaselineFeatureNames.end()};
}

std::vector<std::string> structural_columns() {
  return {kStructuralFeatureNames.begin(), kStructuralFeatureNames.end()};
}

std::vector<std::string> all_feature_columns() {
  auto out = baseline_columns();
  for (auto name : kStructuralFeatureNames) out.emplace_back(name);
  return out;
}

bool is_structural_column(std::string_view name) { return name.starts_with("STRUCT_"); }

Dataset FeatureMatrix::dataset() const { return Dataset(columns, values, labels); }

std::string FeatureMatrix::to_csv() const {
  auto header = columns;
  header.emplace_back("label");
  std::string out = csv::join(header) + "\n";
  const std::size_t width = columns.size();
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      out += csv::fixed(values[r * width + c]);
      out += ',';
    }
    out += std::to_string(labels[r]);
    out += '\n';
  }
  return out;
}

namespace {

FeatureMatrix from_table(const csv::Table& table) {
  if (table.header.size() < 2 || table.header.back() != "label") {
    throw InputError(table.source + ":1", "feature matrix header must end with a 'label' column");
  }
  FeatureMatrix m;
  m.columns.assign(table.header.begin(), table.header.end() - 1);
  const std::size_t width = m.columns.size();
  m.values.reserve(table.rows.size() * width);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < width; ++c) {
      if (row[c].empty()) {
        m.values.push_back(0.0);
        ++m.missing_imputed;
      } else {
        m.values.push_back(csv::parse_double(row[c], table.location(r)));
      }
    }
    const auto label = csv::parse_int(row[width], table.location(r));
    if (label != 0 && label != 1) throw InputError(table.location(r), "label must be 0 or 1");
    m.labels.push_back(static_cast<int>(label));
  }
  m.snapshots = m.rows();
  return m;
}

}  // namespace

FeatureMatrix FeatureMatrix::parse_csv(std::string_view text, const std::string& source) {
  return from_table(csv::parse(text, source));
}

FeatureMatrix FeatureMatrix::read_csv(const std::string& path) { return from_table(csv::read_file(path)); }

FeatureMatrix build_feature_matrix(const StudentSemesterPanel& panel, const StructuralModel& model,
                                   const FeatureMatrixOptions& options) {
  if (&model.graph() != &panel.graph() && model.graph().size() != panel.graph().size()) {
    throw ValidationError("structural model and panel use different curricula");
  }
  ObservationWindow window;
  window.end = options.window_end ? *options.window_end : panel.latest_term();
  window.min_followup_terms = options.min_followup_terms;
  const auto set = snapshot_at(panel, options.ref_term, window);

  FeatureMatrix m;
  m.columns = all_feature_columns();
  m.late_entry_excluded = set.excluded_late_entry;
  m.snapshots = set.snapshots.size();
  for (const auto& snap : set.snapshots) {
    if (snap.censored && !options.include_censored) {
      ++m.censored_excluded;
      continue;
    }
    const auto base = compute_baseline(snap.history, panel.graph(), options.ref_term);
    const auto structural = compute_structural_features(model, snap.history.approved_at(options.ref_term));
    m.values.insert(m.values.end(), base.values.begin(), base.values.end());
    const auto sv = structural.values();
    m.values.insert(m.values.end(), sv.begin(), sv.end());
    m.labels.push_back(snap.label == Label::Dropout ? 1 : 0);
    m.student_ids.push_back(snap.student_id());
  }
  return m;
}

}  // namespace capire
