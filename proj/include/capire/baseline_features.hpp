#pragma once

#include <array>
#include <string_view>

#include "capire/panel.hpp"

namespace capire {

/// The 25 baseline columns. The first 20 mirror the classic trajectory
/// catalogue; the last 5 (`BASE_plumbing_*`) complete the fixed width.
inline constexpr std::size_t kBaselineFeatureCount = 25;

inline constexpr std::array<std::string_view, kBaselineFeatureCount> kBaselineFeatureNames = {
    "BASE_direct_pass_ratio_promotable",
    "BASE_direct_pass_ratio_all",
    "BASE_num_direct_passes",
    "BASE_cohort_year",
    "BASE_regularized_ratio",
    "BASE_gpa",
    "BASE_hs_graduation_year",
    "BASE_hs_graduation_year_var",
    "BASE_exam_pass_rate",
    "BASE_approved_activities_var",
    "BASE_num_regularized",
    "BASE_subject_pass_rate",
    "BASE_num_passed_subjects",
    "BASE_promoted_exams_ratio",
    "BASE_num_exams",
    "BASE_total_courses_taken",
    "BASE_retaken_ratio",
    "BASE_approved_activities",
    "BASE_num_retaken",
    "BASE_num_libre",
    "BASE_plumbing_gender",
    "BASE_plumbing_age_at_entry",
    "BASE_plumbing_inactive_terms",
    "BASE_plumbing_mean_courses_per_active_term",
    "BASE_plumbing_terms_with_pass",
};

struct BaselineFeatureVector {
  std::array<double, kBaselineFeatureCount> values{};

  /// Value by column name; throws ValidationError for an unknown name.
  double operator[](std::string_view name) const;
  friend bool operator==(const BaselineFeatureVector&, const BaselineFeatureVector&) = default;
};

/// Uses only terms 1..ref_term of `history`. Ratios with a zero denominator are
/// 0; GPA is the mean grade over promoted, passed_exam and failed_exam events.
/// Throws ValidationError when the student has no record at or before ref_term.
BaselineFeatureVector compute_baseline(const StudentHistory& history, const CurriculumGraph& graph, int ref_term);

/// Throws ValidationError for an unknown student.
BaselineFeatureVector compute_baseline(const StudentSemesterPanel& panel, std::string_view student_id, int ref_term);

}  // namespace capire
