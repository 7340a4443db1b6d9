#include <gtest/gtest.h>

#include <map>
#include <set>

#include "capire/panel.hpp"
#include "capire/structural_features.hpp"
#include "capire/synth.hpp"

namespace capire {
namespace {

TEST(SynthCurriculum, ThreeCoursesOnePerTermIsAChain) {
  SynthParams p;
  p.n_courses = 3;
  p.courses_per_term_mean = 1.0;
  const auto doc = generate_curriculum(p);
  const auto g = CurriculumGraph::build(doc);
  EXPECT_EQ(g.codes(g.topological_order()), (std::vector<std::string>{"C01", "C02", "C03"}));
  EXPECT_EQ(doc.prerequisites, (std::vector<PrerequisiteEdge>{{"C01", "C02"}, {"C02", "C03"}}));
}

TEST(SynthCurriculum, ValidLayeredAndReduced) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthParams p;
    p.seed = seed;
    p.n_courses = 10 + seed * 3;
    p.edge_density = 0.1 * static_cast<double>(seed % 5);
    const auto g = CurriculumGraph::build(generate_curriculum(p));
    EXPECT_EQ(g.size(), p.n_courses);
    EXPECT_EQ(g.entries().size(), 1u);
    EXPECT_EQ(g.course(g.entries()[0]).code.substr(0, 2), "C0");
    EXPECT_TRUE(transitive_redundancy(g).empty());
    std::set<std::string> modules;
    for (const auto& c : g.courses()) {
      EXPECT_GE(c.credits.value(), 3.0);
      EXPECT_LE(c.credits.value(), 8.0);
      modules.insert(c.module);
    }
    EXPECT_LE(modules.size(), p.n_modules);
    for (CourseId v = 0; v < g.size(); ++v)
      if (v != g.entries()[0]) EXPECT_GE(g.in_degree(v), 1u);
  }
}

TEST(SynthCurriculum, Deterministic) {
  SynthParams p;
  p.seed = 5;
  EXPECT_EQ(serialize_curriculum(generate_curriculum(p)), serialize_curriculum(generate_curriculum(p)));
  SynthParams q = p;
  q.seed = 6;
  EXPECT_NE(serialize_curriculum(generate_curriculum(p)), serialize_curriculum(generate_curriculum(q)));
}

TEST(SynthParams, Validation) {
  auto bad = [](auto mutate) {
    SynthParams p;
    mutate(p);
    return p;
  };
  EXPECT_THROW(bad([](SynthParams& p) { p.n_courses = 2; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SynthParams& p) { p.edge_density = 1.5; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SynthParams& p) { p.dropout_base_hazard = -0.1; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SynthParams& p) { p.blocked_credits_hazard_coefficient = -1; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SynthParams& p) { p.first_cohort = 2030; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SynthParams& p) { p.window_end = {2019, 2}; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SynthParams& p) { p.courses_per_term_mean = 0.5; }).validate(), ValidationError);
}

class SynthCohortTest : public ::testing::Test {
 protected:
  SynthCohortTest() {
    params.seed = 3;
    params.n_students = 200;
    graph = std::make_unique<CurriculumGraph>(CurriculumGraph::build(generate_curriculum(params)));
    cohort = generate_cohort(*graph, params);
  }

  SynthParams params;
  std::unique_ptr<CurriculumGraph> graph;
  SynthCohort cohort;
};

TEST_F(SynthCohortTest, ProfilesAndRecordsAgree) {
  ASSERT_EQ(cohort.profiles.size(), 200u);
  std::map<std::string, int> cohort_of;
  for (const auto& p : cohort.profiles) {
    EXPECT_GE(p.cohort_year, params.first_cohort);
    EXPECT_LE(p.cohort_year, params.last_cohort);
    EXPECT_LE(p.hs_graduation_year, p.cohort_year);
    EXPECT_TRUE(p.gender == "F" || p.gender == "M");
    EXPECT_TRUE(p.graduated.has_value());
    cohort_of[p.student_id] = p.cohort_year;
  }
  std::uint64_t last_sequence = 0;
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    const auto& r = cohort.records[i];
    if (i > 0) EXPECT_GT(r.sequence, last_sequence);
    last_sequence = r.sequence;
    EXPECT_GE(r.term.year, cohort_of.at(r.student_id));
    EXPECT_LE(r.term, params.window_end);
    EXPECT_EQ(r.grade.has_value(), is_graded(r.outcome));
  }
  const auto panel = build_panel(cohort.records, cohort.profiles, *graph);
  EXPECT_EQ(panel.stats().records_quarantined, 0u);
  EXPECT_EQ(panel.stats().students, 200u);
}

TEST_F(SynthCohortTest, EnrolmentsRespectPrerequisitesAndExamsFollowRegularisation) {
  std::map<std::string, std::vector<const TrajectoryRecord*>> by_student;
  for (const auto& r : cohort.records) by_student[r.student_id].push_back(&r);
  for (const auto& [id, recs] : by_student) {
    std::set<std::string> passed, pending;
    std::size_t i = 0;
    while (i < recs.size()) {
      const CalendarTerm term = recs[i]->term;
      std::set<std::string> passed_before = passed;
      for (; i < recs.size() && recs[i]->term == term; ++i) {
        const auto& r = *recs[i];
        EXPECT_FALSE(passed.count(r.course_code)) << id << " retakes a passed course";
        if (is_exam(r.outcome)) {
          EXPECT_TRUE(pending.count(r.course_code)) << id << " sits an exam without regularising";
        } else {
          for (CourseId p : graph->predecessors(graph->id_of(r.course_code)))
            EXPECT_TRUE(passed_before.count(graph->course(p).code)) << id << " skips a prerequisite";
        }
        if (is_passing(r.outcome)) {
          passed.insert(r.course_code);
          pending.erase(r.course_code);
        }
        if (r.outcome == Outcome::Regularized) pending.insert(r.course_code);
      }
    }
  }
}

TEST_F(SynthCohortTest, Deterministic) {
  const auto again = generate_cohort(*graph, params);
  EXPECT_EQ(write_records(again.records), write_records(cohort.records));
  EXPECT_EQ(write_profiles(again.profiles), write_profiles(cohort.profiles));
  SynthParams other = params;
  other.seed = 4;
  EXPECT_NE(write_records(generate_cohort(*graph, other).records), write_records(cohort.records));
}

TEST(SynthCohort, CertainPassesAndNoHazardGraduateEveryone) {
  SynthParams p;
  p.n_students = 100;
  p.base_pass_probability = 1.0;
  p.ability_spread = 0.0;
  p.dropout_base_hazard = 0.0;
  p.gap_probability = 0.0;
  p.last_cohort = 2016;
  const auto g = CurriculumGraph::build(generate_curriculum(p));
  const auto cohort = generate_cohort(g, p);
  for (const auto& prof : cohort.profiles) EXPECT_EQ(prof.graduated, true) << prof.student_id;
  for (const auto& r : cohort.records) EXPECT_EQ(r.outcome, Outcome::Promoted);
}

TEST(SynthCohort, HazardCouplingRaisesDropout) {
  auto dropouts = [](double coefficient) {
    SynthParams p;
    p.seed = 8;
    p.blocked_credits_hazard_coefficient = coefficient;
    const auto g = CurriculumGraph::build(generate_curriculum(p));
    const auto cohort = generate_cohort(g, p);
    std::map<std::string, CalendarTerm> last;
    for (const auto& r : cohort.records) last[r.student_id] = r.term;
    int count = 0;
    for (const auto& prof : cohort.profiles) {
      const CalendarTerm entry{prof.cohort_year, 1};
      if (!*prof.graduated && last.at(prof.student_id).ordinal() - entry.ordinal() + 1 < p.terms_horizon &&
          last.at(prof.student_id) < p.window_end)
        ++count;
    }
    return count;
  };
  EXPECT_GT(dropouts(0.1), dropouts(0.0) + 100);
}

TEST(SynthCohort, StrongCouplingConcentratesDropoutOnBlockedCredits) {
  // Pooled over terms: blocked credits in the last term of a dropout vs. in
  // every term a student continues past.
  SynthParams p;
  p.seed = 12;
  p.n_students = 1000;
  p.blocked_credits_hazard_coefficient = 0.2;
  const auto g = CurriculumGraph::build(generate_curriculum(p));
  const auto cohort = generate_cohort(g, p);
  const auto panel = build_panel(cohort.records, cohort.profiles, g);
  EXPECT_TRUE(panel.warnings().empty());
  const auto model = StructuralModel::from_graph(g);
  double dropout_sum = 0, continuing_sum = 0;
  std::size_t dropout_terms = 0, continuing_terms = 0;
  for (const auto& s : panel.students()) {
    for (int t = 1; t <= s.last_term(); ++t) {
      const double bc = blocked_credits(model, s.approved_at(t));
      if (t < s.last_term()) {
        continuing_sum += bc;
        ++continuing_terms;
      } else if (!s.graduated && s.entry.plus(t - 1) < p.window_end) {
        dropout_sum += bc;
        ++dropout_terms;
      }
    }
  }
  ASSERT_GT(dropout_terms, 50u);
  EXPECT_GT(dropout_sum / static_cast<double>(dropout_terms), continuing_sum / static_cast<double>(continuing_terms));
}

}  // namespace
}  // namespace capire
