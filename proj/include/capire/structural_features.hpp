#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "capire/centrality.hpp"
#include "capire/course_set.hpp"
#include "capire/curriculum.hpp"

namespace capire {

struct StructuralOptions {
  /// Divide module entropy by ln(#modules present in S) when more than one.
  bool normalise_module_diversity = false;
};

/// Curriculum graph plus the precomputed backbone and bottleneck sets the
/// nine structural features are defined over. Holds a reference to the graph.
class StructuralModel {
 public:
  StructuralModel(const CurriculumGraph& graph, CourseSet backbone, CourseSet bottlenecks,
                  StructuralOptions options = {});

  /// Backbone from the graph's entry/terminal sets, bottlenecks from `criteria`.
  static StructuralModel from_graph(const CurriculumGraph& graph, const BottleneckCriteria& criteria = {},
                                    StructuralOptions options = {}, unsigned threads = 1);

  const CurriculumGraph& graph() const { return *graph_; }
  const CourseSet& backbone() const { return backbone_; }
  const CourseSet& bottlenecks() const { return bottlenecks_; }
  const Credits& backbone_credits() const { return backbone_credits_; }
  const StructuralOptions& options() const { return options_; }

  /// Warnings about degenerate (constant) features, e.g. an empty bottleneck set.
  std::vector<std::string> warnings() const;

 private:
  const CurriculumGraph* graph_;
  CourseSet backbone_;
  CourseSet bottlenecks_;
  Credits backbone_credits_;
  StructuralOptions options_;
};

// Every function below takes the approved set S (S_{i,t} when predicting t+1)
// and throws ValidationError when S is not a set over the model's curriculum.

double structural_credits_approved(const StructuralModel& model, const CourseSet& approved);
/// Throws ValidationError when the backbone carries no credits.
double backbone_completion_rate(const StructuralModel& model, const CourseSet& approved);
/// 1.0 when the bottleneck set is empty.
double bottleneck_approval_ratio(const StructuralModel& model, const CourseSet& approved);
double blocked_credits(const StructuralModel& model, const CourseSet& approved);
/// Fewest courses outside S on a path from S (from an entry when S is empty)
/// to any terminal. Throws ValidationError when no such path exists.
std::size_t distance_to_graduation(const StructuralModel& model, const CourseSet& approved);
std::size_t prerequisites_met(const StructuralModel& model, const CourseSet& approved);
double mean_in_degree_approved(const StructuralModel& model, const CourseSet& approved);
double mean_out_degree_approved(const StructuralModel& model, const CourseSet& approved);
/// Shannon entropy (natural log) of the module distribution of S.
double module_diversity(const StructuralModel& model, const CourseSet& approved);

struct StructuralFeatureVector {
  double structural_credits = 0.0;
  double backbone_completion = 0.0;
  double bottleneck_approval = 0.0;
  double blocked_credits = 0.0;
  std::size_t distance_to_graduation = 0;
  std::size_t prerequisites_met = 0;
  double mean_in_degree = 0.0;
  double mean_out_degree = 0.0;
  double module_diversity = 0.0;

  static constexpr std::size_t kSize = 9;
  std::array<double, kSize> values() const;
  friend bool operator==(const StructuralFeatureVector&, const StructuralFeatureVector&) = default;
};

/// Export column names, in StructuralFeatureVector field order.
inline constexpr std::array<std::string_view, StructuralFeatureVector::kSize> kStructuralFeatureNames = {
    "STRUCT_structural_credits_approved", "STRUCT_backbone_completion",    "STRUCT_bottleneck_approval_ratio",
    "STRUCT_blocked_credits",             "STRUCT_distance_to_graduation", "STRUCT_num_prerequisites_met",
    "STRUCT_in_degree_mean_approved",     "STRUCT_out_degree_mean_approved", "STRUCT_module_diversity"};

StructuralFeatureVector compute_structural_features(const StructuralModel& model, const CourseSet& approved);

}  // namespace capire
