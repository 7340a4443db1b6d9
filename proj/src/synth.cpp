#include "capire/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "capire/errors.hpp"
#include "capire/rng.hpp"
#include "capire/structural_features.hpp"

namespace capire {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(name) + " must lie in [0, 1]");
}

std::string padded(char prefix, std::size_t value, std::size_t total) {
  const int width = std::max(2, static_cast<int>(std::to_string(total).size()));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, value);
  return buf;
}

}  // namespace

void SynthParams::validate() const {
  if (n_courses < 3) throw ValidationError("n_courses must be >= 3");
  if (n_modules < 1) throw ValidationError("n_modules must be >= 1");
  if (terms_horizon < 1) throw ValidationError("terms_horizon must be >= 1");
  if (!(courses_per_term_mean >= 1.0)) throw ValidationError("courses_per_term_mean must be >= 1");
  if (!(blocked_credits_hazard_coefficient >= 0.0)) throw ValidationError("hazard coefficient must be >= 0");
  require_probability(edge_density, "edge_density");
  require_probability(gateway_share, "gateway_share");
  require_probability(base_pass_probability, "base_pass_probability");
  require_probability(dropout_base_hazard, "dropout_base_hazard");
  require_probability(gap_probability, "gap_probability");
  if (!(ability_spread >= 0.0 && ability_spread <= 1.0)) throw ValidationError("ability_spread must lie in [0, 1]");
  if (first_cohort > last_cohort) throw ValidationError("first_cohort must not exceed last_cohort");
  if (window_end.half != 1 && window_end.half != 2) throw ValidationError("window end half must be 1 or 2");
  if (CalendarTerm{last_cohort, 1} > window_end) throw ValidationError("window ends before the last cohort enters");
}

CurriculumDocument generate_curriculum(const SynthParams& params) {
  params.validate();
  const std::size_t n = params.n_courses;
  const auto load = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(params.courses_per_term_mean)));
  const std::size_t layers = std::clamp<std::size_t>(
      params.n_layers > 0 ? params.n_layers : (n - 1 + load - 1) / load + 1, 2, n);

  // layer_of[i] for course i (0 = the entry course).
  std::vector<std::size_t> layer_of(n, 0);
  std::vector<std::vector<std::size_t>> members(layers);
  members[0] = {0};
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t layer = 1 + (i - 1) * (layers - 1) / (n - 1);
    layer_of[i] = layer;
    members[layer].push_back(i);
  }

  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(substream_seed(params.seed, static_cast<std::uint64_t>(attempt) << 32));
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (std::size_t v = 1; v < n; ++v) {
      // The first course of each layer is a gateway that most of the next layer depends on.
      const auto& prev = members[layer_of[v] - 1];
      const std::size_t pick = bernoulli(rng, params.gateway_share) ? 0 : uniform_index(rng, prev.size());
      adj[prev[pick]][v] = 1;
    }
    for (std::size_t v = 1; v < n; ++v) {
      const std::size_t lo = layer_of[v] >= 2 ? layer_of[v] - 2 : 0;
      for (std::size_t layer = lo; layer < layer_of[v]; ++layer) {
        for (std::size_t u : members[layer]) {
          if (!adj[u][v] && bernoulli(rng, params.edge_density)) adj[u][v] = 1;
        }
      }
    }
    // Transitive reduction: indices are a topological order.
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t u = n; u-- > 0;) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (!adj[u][v]) continue;
        reach[u][v] = 1;
        for (std::size_t w = v + 1; w < n; ++w)
          if (reach[v][w]) reach[u][w] = 1;
      }
    }
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (!adj[u][v]) continue;
        for (std::size_t w = u + 1; w < v; ++w) {
          if (adj[u][w] && reach[w][v]) {
            adj[u][v] = 2;  // redundant; removed below
            break;
          }
        }
      }
    }

    CurriculumDocument doc;
    for (std::size_t i = 0; i < n; ++i) {
      Course c;
      c.code = padded('C', i + 1, n);
      c.name = "Course " + std::to_string(i + 1);
      c.module = padded('M', 1 + layer_of[i] * params.n_modules / layers, params.n_modules);
      c.credits = Credits(static_cast<std::int64_t>(3 + uniform_index(rng, 6)));
      c.is_entry = i == 0;
      c.promotable = bernoulli(rng, 0.75);
      doc.courses.push_back(std::move(c));
    }
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (adj[u][v] == 1) doc.prerequisites.push_back({doc.courses[u].code, doc.courses[v].code});

    try {
      CurriculumGraph::build(doc);
      return doc;
    } catch (const CurriculumError&) {
      continue;
    }
  }
  throw ValidationError("could not generate a valid curriculum in 100 attempts");
}

SynthCohort generate_cohort(const CurriculumGraph& graph, const SynthParams& params) {
  params.validate();
  const std::size_t n = graph.size();
  const StructuralModel model(graph, CourseSet(n), CourseSet(n));
  double max_out = 1.0;
  for (CourseId c = 0; c < n; ++c) max_out = std::max(max_out, static_cast<double>(graph.out_degree(c)));
  SynthCohort out;
  std::uint64_t sequence = 0;

  for (std::size_t s = 0; s < params.n_students; ++s) {
    Rng rng(substream_seed(params.seed, s + 1));
    StudentProfile profile;
    profile.student_id = padded('S', s + 1, params.n_students);
    profile.cohort_year =
        params.first_cohort +
        static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(params.last_cohort - params.first_cohort + 1)));
    const int hs_gap = bernoulli(rng, 0.6) ? 0 : 1 + static_cast<int>(uniform_index(rng, 3));
    profile.hs_graduation_year = profile.cohort_year - hs_gap;
    profile.age_at_entry = std::round((17.5 + hs_gap + uniform01(rng) * 1.5) * 100.0) / 100.0;
    profile.gender = bernoulli(rng, 0.5) ? "F" : "M";
    const double ability = std::clamp(
        params.base_pass_probability + params.ability_spread * (2.0 * uniform01(rng) - 1.0), 0.0, 1.0);

    const double choice_bias = params.choice_bias_spread * (2.0 * uniform01(rng) - 1.0);
    auto pass_probability = [&](CourseId c) {
      return std::clamp(ability - params.hub_difficulty * static_cast<double>(graph.out_degree(c)) / max_out, 0.0, 1.0);
    };
    const CalendarTerm entry{profile.cohort_year, 1};
    CourseSet passed(n);
    std::vector<char> pending(n, 0);  // regularised, awaiting a final exam
    bool graduated = false;

    for (int t = 1; t <= params.terms_horizon && !graduated; ++t) {
      const CalendarTerm term = entry.plus(t - 1);
      if (term > params.window_end) break;
      if (t > 1) {
        const double hazard = std::min(
            1.0, params.dropout_base_hazard *
                     (1.0 + params.blocked_credits_hazard_coefficient * blocked_credits(model, passed)));
        if (bernoulli(rng, hazard)) break;
        if (bernoulli(rng, params.gap_probability)) continue;
      }

      std::vector<TrajectoryRecord> term_records;
      auto emit = [&](CourseId c, Outcome outcome, std::optional<double> grade) {
        term_records.push_back({profile.student_id, term, graph.course(c).code, outcome, grade, 0});
      };
      const CourseSet passed_before = passed;

      for (CourseId c = 0; c < n; ++c) {
        if (!pending[c] || !bernoulli(rng, 0.6)) continue;
        if (bernoulli(rng, pass_probability(c))) {
          emit(c, Outcome::PassedExam, 4.0 + static_cast<double>(uniform_index(rng, 7)));
          passed.insert(c);
          pending[c] = 0;
        } else {
          emit(c, Outcome::FailedExam, 1.0 + static_cast<double>(uniform_index(rng, 3)));
        }
      }

      std::vector<CourseId> available;
      for (CourseId c = 0; c < n; ++c) {
        if (passed_before.contains(c) || passed.contains(c) || pending[c]) continue;
        bool ready = true;
        for (CourseId p : graph.predecessors(c)) ready = ready && passed_before.contains(p);
        if (ready) available.push_back(c);
      }
      // Random order, tilted towards (bias > 0) or away from (bias < 0) courses with many dependents.
      std::vector<std::pair<double, CourseId>> ranked;
      for (CourseId c : available) {
        ranked.push_back({uniform01(rng) + choice_bias * static_cast<double>(graph.out_degree(c)) / max_out, c});
      }
      std::sort(ranked.begin(), ranked.end(), std::greater<>());
      for (std::size_t i = 0; i < ranked.size(); ++i) available[i] = ranked[i].second;
      const auto mean = static_cast<std::size_t>(std::lround(params.courses_per_term_mean));
      const std::size_t load = std::max<std::size_t>(1, mean - 1 + uniform_index(rng, 3));
      available.resize(std::min(available.size(), load));
      std::sort(available.begin(), available.end());
      for (CourseId c : available) {
        if (bernoulli(rng, pass_probability(c))) {
          emit(c, Outcome::Promoted, 7.0 + static_cast<double>(uniform_index(rng, 4)));
          passed.insert(c);
        } else {
          const double u = uniform01(rng);
          if (u < 0.5) {
            emit(c, Outcome::Regularized, std::nullopt);
            pending[c] = 1;
          } else if (u < 0.8) {
            emit(c, Outcome::Libre, std::nullopt);
          } else {
            emit(c, Outcome::EnrolledOnly, std::nullopt);
          }
        }
      }
      for (auto& r : term_records) {
        r.sequence = sequence++;
        out.records.push_back(std::move(r));
      }
      graduated = passed.size() == n;
    }
    profile.graduated = graduated;
    out.profiles.push_back(std::move(profile));
  }
  return out;
}

}  // namespace capire
