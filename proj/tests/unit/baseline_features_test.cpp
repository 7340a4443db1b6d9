#include <gtest/gtest.h>

#include <set>

#include "capire/baseline_features.hpp"
#include "support/fixtures.hpp"

namespace capire {
namespace {

TrajectoryRecord rec(int year, int half, std::string code, Outcome outcome,
                     std::optional<double> grade = std::nullopt) {
  return {"s1", {year, half}, std::move(code), outcome, grade, 0};
}

class BaselineTest : public ::testing::Test {
 protected:
  BaselineTest() {
    auto doc = fixtures::document({fixtures::course("A", "m", 4), fixtures::course("B", "m", 4),
                                   fixtures::course("C", "m", 4), fixtures::course("D", "m", 4),
                                   fixtures::course("E", "m", 4)},
                                  {});
    doc.courses[3].promotable = false;  // D
    graph = std::make_unique<CurriculumGraph>(CurriculumGraph::build(doc));
  }

  StudentSemesterPanel panel(const std::vector<TrajectoryRecord>& records) const {
    StudentProfile p{"s1", 2020, 2017, 19.25, "F", {}};
    return build_panel(records, std::vector{p}, *graph);
  }

  std::unique_ptr<CurriculumGraph> graph;
};

TEST_F(BaselineTest, CountingExample) {
  const auto p = panel({rec(2020, 1, "A", Outcome::Promoted, 8.0), rec(2020, 1, "B", Outcome::Promoted, 9.0),
                        rec(2020, 2, "C", Outcome::Regularized), rec(2020, 2, "E", Outcome::Libre)});
  const auto f = compute_baseline(p, "s1", 5);
  EXPECT_EQ(f["BASE_num_direct_passes"], 2.0);
  EXPECT_EQ(f["BASE_subject_pass_rate"], 0.5);
  EXPECT_EQ(f["BASE_regularized_ratio"], 0.25);
  EXPECT_EQ(f["BASE_num_libre"], 1.0);
  EXPECT_EQ(f["BASE_gpa"], 8.5);
  EXPECT_EQ(f["BASE_total_courses_taken"], 4.0);
  EXPECT_EQ(f["BASE_direct_pass_ratio_all"], 0.5);
  EXPECT_EQ(f["BASE_direct_pass_ratio_promotable"], 0.5);
  EXPECT_EQ(f["BASE_num_regularized"], 1.0);
  EXPECT_EQ(f["BASE_num_passed_subjects"], 2.0);
  EXPECT_EQ(f["BASE_exam_pass_rate"], 0.0);
  EXPECT_EQ(f["BASE_approved_activities"], 3.0);
  EXPECT_EQ(f["BASE_approved_activities_var"], 0.75);
  EXPECT_EQ(f["BASE_plumbing_gender"], 1.0);
  EXPECT_EQ(f["BASE_plumbing_age_at_entry"], 19.25);
  EXPECT_EQ(f["BASE_plumbing_inactive_terms"], 3.0);
  EXPECT_EQ(f["BASE_plumbing_mean_courses_per_active_term"], 2.0);
  EXPECT_EQ(f["BASE_plumbing_terms_with_pass"], 1.0);
  EXPECT_EQ(f["BASE_cohort_year"], 2020.0);
  EXPECT_EQ(f["BASE_hs_graduation_year"], 2017.0);
  EXPECT_EQ(f["BASE_hs_graduation_year_var"], 3.0);
}

TEST_F(BaselineTest, ExamsAndRetakes) {
  const auto p = panel({rec(2020, 1, "A", Outcome::Regularized), rec(2020, 1, "D", Outcome::Libre),
                        rec(2020, 2, "A", Outcome::FailedExam, 3.0), rec(2020, 2, "D", Outcome::Promoted, 7.0),
                        rec(2021, 1, "A", Outcome::PassedExam, 7.0)});
  const auto f = compute_baseline(p, "s1", 3);
  EXPECT_EQ(f["BASE_num_exams"], 2.0);
  EXPECT_EQ(f["BASE_exam_pass_rate"], 0.5);
  EXPECT_EQ(f["BASE_num_retaken"], 1.0);
  EXPECT_EQ(f["BASE_retaken_ratio"], 1.0 / 3.0);
  EXPECT_EQ(f["BASE_promoted_exams_ratio"], 1.0 / 3.0);
  EXPECT_EQ(f["BASE_direct_pass_ratio_promotable"], 0.0);  // D is not promotable
  EXPECT_EQ(f["BASE_gpa"], 17.0 / 3.0);
  EXPECT_EQ(f["BASE_plumbing_terms_with_pass"], 2.0);
}

TEST_F(BaselineTest, ZeroDenominatorsDefaultToZero) {
  const auto p = panel({rec(2020, 1, "A", Outcome::EnrolledOnly)});
  const auto f = compute_baseline(p, "s1", 5);
  EXPECT_EQ(f["BASE_exam_pass_rate"], 0.0);
  EXPECT_EQ(f["BASE_gpa"], 0.0);
  EXPECT_EQ(f["BASE_promoted_exams_ratio"], 0.0);
}

TEST_F(BaselineTest, IgnoresTermsAfterReference) {
  const auto short_history = panel({rec(2020, 1, "A", Outcome::Promoted, 8.0)});
  const auto long_history = panel({rec(2020, 1, "A", Outcome::Promoted, 8.0),
                                   rec(2021, 1, "B", Outcome::Promoted, 10.0)});
  EXPECT_EQ(compute_baseline(short_history, "s1", 2), compute_baseline(long_history, "s1", 2));
}

TEST_F(BaselineTest, Errors) {
  const auto p = panel({rec(2020, 2, "A", Outcome::Promoted, 8.0)});
  EXPECT_THROW(compute_baseline(p, "nobody", 5), ValidationError);
  const auto f = compute_baseline(p, "s1", 5);
  EXPECT_THROW(f["BASE_nothing"], ValidationError);
}

TEST(BaselineNames, TwentyFiveDistinctWithFivePlumbing) {
  std::set<std::string_view> names(kBaselineFeatureNames.begin(), kBaselineFeatureNames.end());
  EXPECT_EQ(names.size(), 25u);
  int plumbing = 0;
  for (auto n : names) {
    EXPECT_EQ(n.substr(0, 5), "BASE_");
    plumbing += n.starts_with("BASE_plumbing_") ? 1 : 0;
  }
  EXPECT_EQ(plumbing, 5);
}

}  // namespace
}  // namespace capire
