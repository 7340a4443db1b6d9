#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capire/forest.hpp"
#include "capire/panel.hpp"
#include "capire/structural_features.hpp"

namespace capire {

/// Column names of the full matrix: 25 baseline then 9 structural.
std::vector<std::string> baseline_columns();
std::vector<std::string> structural_columns();
std::vector<std::string> all_feature_columns();
bool is_structural_column(std::string_view name);

/// One row per student snapshot. Rows are in student id order.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<double> values;  // row-major
  std::vector<int> labels;
  std::vector<std::string> student_ids;  // empty when read back from a file

  std::size_t missing_imputed = 0;
  std::size_t snapshots = 0;
  std::size_t censored_excluded = 0;
  std::size_t late_entry_excluded = 0;

  std::size_t rows() const { return labels.size(); }
  Dataset dataset() const;

  /// Header = feature columns then `label`; reals with 6 decimals.
  std::string to_csv() const;
  /// Last column must be `label`. Empty cells become 0 and are counted in
  /// `missing_imputed`.
  static FeatureMatrix parse_csv(std::string_view text, const std::string& source = "<features>");
  static FeatureMatrix read_csv(const std::string& path);
};

struct FeatureMatrixOptions {
  int ref_term = 5;
  /// Defaults to the panel's latest term.
  std::optional<CalendarTerm> window_end;
  int min_followup_terms = 2;
  bool include_censored = false;
};

/// Snapshots every student at `ref_term` and computes baseline and structural
/// features from history up to that term only.
FeatureMatrix build_feature_matrix(const StudentSemesterPanel& panel, const StructuralModel& model,
                                   const FeatureMatrixOptions& options = {});

}  // namespace capire
