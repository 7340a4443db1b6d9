#pragma once

#include <cstdint>
#include <vector>

#include "capire/curriculum.hpp"
#include "capire/panel.hpp"

namespace capire {

struct SynthParams {
  std::size_t n_courses = 24;
  std::size_t n_modules = 4;
  /// Probability of each optional extra prerequisite edge.
  double edge_density = 0.15;
  /// Semester layers of the generated curriculum (0 = one per courses_per_term_mean courses).
  std::size_t n_layers = 0;
  /// Share of courses whose required prerequisite is the previous layer's gateway course.
  double gateway_share = 0.6;
  std::size_t n_students = 800;
  int terms_horizon = 14;
  double base_pass_probability = 0.7;
  double dropout_base_hazard = 0.01;
  /// Hazard multiplier per blocked credit.
  double blocked_credits_hazard_coefficient = 0.1;
  double courses_per_term_mean = 3.0;
  std::uint64_t seed = 0;

  int first_cohort = 2015;
  int last_cohort = 2021;
  /// Last calendar term with data.
  CalendarTerm window_end{2025, 2};
  /// Chance of an inactive (no records) term for a continuing student.
  double gap_probability = 0.03;
  /// Per-student pass probability varies uniformly by +/- this amount.
  double ability_spread = 0.15;
  /// Pass probability drop for the course with the most dependents, scaled
  /// linearly by out-degree for the others.
  double hub_difficulty = 0.0;
  /// Per-student tilt of course choice towards (or away from) courses with
  /// many dependents, uniform in +/- this amount.
  double choice_bias_spread = 0.0;

  /// Throws ValidationError for out-of-range values.
  void validate() const;
};

/// Layered DAG: one entry course, every later course has a prerequisite in
/// the previous layer, optional extra edges from the two preceding layers,
/// transitively reduced. Credits are 3..8, modules are bands of layers.
CurriculumDocument generate_curriculum(const SynthParams& params);

struct SynthCohort {
  std::vector<TrajectoryRecord> records;
  std::vector<StudentProfile> profiles;
};

/// Term-by-term simulation. Before every term after the first, a student
/// drops out with probability base_hazard * (1 + coefficient * blocked credits).
/// Only prerequisite-satisfied courses are taken; students who pass every
/// course graduate.
SynthCohort generate_cohort(const CurriculumGraph& graph, const SynthParams& params);

}  // namespace capire
