#include "capire/baseline_features.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace capire {

namespace {

double ratio(std::size_t numerator, std::size_t denominator) {
  return denominator == 0 ? 0.0 : static_cast<double>(numerator) / static_cast<double>(denominator);
}

bool is_female(std::string gender) {
  std::transform(gender.begin(), gender.end(), gender.begin(), [](unsigned char c) { return std::tolower(c); });
  return gender == "f" || gender == "female";
}

}  // namespace

double BaselineFeatureVector::operator[](std::string_view name) const {
  for (std::size_t i = 0; i < kBaselineFeatureCount; ++i)
    if (kBaselineFeatureNames[i] == name) return values[i];
  throw ValidationError("unknown baseline feature '" + std::string(name) + "'");
}

BaselineFeatureVector compute_baseline(const StudentHistory& history, const CurriculumGraph& graph, int ref_term) {
  std::size_t enrolments = 0, promotable_enrolments = 0, promoted_in_promotable = 0;
  std::size_t promoted = 0, regularized = 0, libre = 0, passed_exams = 0, exams = 0;
  std::size_t graded = 0, active_terms = 0, terms_with_pass = 0;
  double grade_sum = 0.0;
  std::set<CourseId> attempted, enrolled;

  for (const auto& row : history.rows) {
    if (row.term_index > ref_term) break;
    if (row.active()) ++active_terms;
    bool passed_here = false;
    for (const auto& e : row.events) {
      attempted.insert(e.course);
      if (e.grade) {
        ++graded;
        grade_sum += *e.grade;
      }
      if (is_passing(e.outcome)) passed_here = true;
      if (is_exam(e.outcome)) {
        ++exams;
        if (e.outcome == Outcome::PassedExam) ++passed_exams;
        continue;
      }
      ++enrolments;
      enrolled.insert(e.course);
      const bool promotable = graph.course(e.course).promotable;
      if (promotable) ++promotable_enrolments;
      switch (e.outcome) {
        case Outcome::Promoted:
          ++promoted;
          if (promotable) ++promoted_in_promotable;
          break;
        case Outcome::Regularized: ++regularized; break;
        case Outcome::Libre: ++libre; break;
        default: break;
      }
    }
    if (passed_here) ++terms_with_pass;
  }
  if (active_terms == 0) {
    throw ValidationError("student '" + history.id() + "' has no record at or before term " +
                          std::to_string(ref_term));
  }

  const std::size_t passed_subjects = history.approved_at(ref_term).size();
  const std::size_t approved_activities = promoted + regularized + passed_exams;
  const std::size_t retaken = enrolments - enrolled.size();
  const StudentProfile& p = history.profile;

  BaselineFeatureVector f;
  f.values = {
      ratio(promoted_in_promotable, promotable_enrolments),
      ratio(promoted, enrolments),
      static_cast<double>(promoted),
      static_cast<double>(p.cohort_year),
      ratio(regularized, enrolments),
      graded == 0 ? 0.0 : grade_sum / static_cast<double>(graded),
      static_cast<double>(p.hs_graduation_year),
      static_cast<double>(history.entry.year - p.hs_graduation_year),
      ratio(passed_exams, exams),
      ratio(approved_activities, enrolments + exams),
      static_cast<double>(regularized),
      ratio(passed_subjects, attempted.size()),
      static_cast<double>(passed_subjects),
      ratio(promoted, promoted + exams),
      static_cast<double>(exams),
      static_cast<double>(enrolments),
      ratio(retaken, enrolments),
      static_cast<double>(approved_activities),
      static_cast<double>(retaken),
      static_cast<double>(libre),
      is_female(p.gender) ? 1.0 : 0.0,
      p.age_at_entry,
      static_cast<double>(ref_term - static_cast<int>(active_terms)),
      ratio(enrolments, active_terms),
      static_cast<double>(terms_with_pass),
  };
  return f;
}

BaselineFeatureVector compute_baseline(const StudentSemesterPanel& panel, std::string_view student_id, int ref_term) {
  return compute_baseline(panel.student(student_id), panel.graph(), ref_term);
}

}  // namespace capire
