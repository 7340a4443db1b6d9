#include "capire/panel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <tuple>

#include "capire/csv.hpp"

namespace capire {

namespace {

constexpr std::array<std::pair<Outcome, std::string_view>, 6> kOutcomeNames = {{
    {Outcome::Promoted, "promoted"},
    {Outcome::Regularized, "regularized"},
    {Outcome::PassedExam, "passed_exam"},
    {Outcome::FailedExam, "failed_exam"},
    {Outcome::Libre, "libre"},
    {Outcome::EnrolledOnly, "enrolled_only"},
}};

// Lower is stronger; decides conflicting duplicates of equal recency.
int precedence(Outcome o) {
  switch (o) {
    case Outcome::Promoted: return 0;
    case Outcome::PassedExam: return 1;
    case Outcome::Regularized: return 2;
    case Outcome::FailedExam: return 3;
    case Outcome::Libre: return 4;
    case Outcome::EnrolledOnly: return 5;
  }
  return 6;
}

std::optional<bool> parse_flag(std::string_view text, const std::string& location) {
  if (text.empty()) return std::nullopt;
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InputError(location, "invalid boolean '" + std::string(text) + "'");
}

std::string grade_text(const std::optional<double>& grade) {
  if (!grade) return "";
  std::string s = csv::fixed(*grade, 2);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string_view to_string(Outcome outcome) {
  for (auto [o, name] : kOutcomeNames)
    if (o == outcome) return name;
  return "unknown";
}

Outcome parse_outcome(std::string_view text) {
  for (auto [o, name] : kOutcomeNames)
    if (name == text) return o;
  throw ValidationError("unknown outcome '" + std::string(text) + "'");
}

std::string CalendarTerm::to_string() const { return std::to_string(year) + "-" + std::to_string(half); }

CalendarTerm CalendarTerm::parse(std::string_view text) {
  const auto dash = text.rfind('-');
  if (dash == std::string_view::npos || dash == 0) {
    throw ValidationError("invalid calendar term '" + std::string(text) + "' (expected YEAR-HALF)");
  }
  CalendarTerm t;
  const auto y = text.substr(0, dash);
  const auto h = text.substr(dash + 1);
  auto r1 = std::from_chars(y.data(), y.data() + y.size(), t.year);
  auto r2 = std::from_chars(h.data(), h.data() + h.size(), t.half);
  if (r1.ec != std::errc() || r1.ptr != y.data() + y.size() || r2.ec != std::errc() ||
      r2.ptr != h.data() + h.size() || (t.half != 1 && t.half != 2)) {
    throw ValidationError("invalid calendar term '" + std::string(text) + "' (expected YEAR-HALF)");
  }
  return t;
}

static std::vector<TrajectoryRecord> records_from_table(const csv::Table& table) {
  csv::require_header(table, kRecordsHeader);
  std::vector<TrajectoryRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string location = table.location(i);
    TrajectoryRecord r;
    r.student_id = row[0];
    if (r.student_id.empty()) throw InputError(location, "empty student_id");
    r.term.year = static_cast<int>(csv::parse_int(row[1], location));
    r.term.half = static_cast<int>(csv::parse_int(row[2], location));
    if (r.term.half != 1 && r.term.half != 2) throw InputError(location, "half must be 1 or 2");
    r.course_code = row[3];
    try {
      r.outcome = parse_outcome(row[4]);
    } catch (const ValidationError& e) {
      throw InputError(location, e.what());
    }
    if (!row[5].empty()) r.grade = csv::parse_double(row[5], location);
    r.sequence = i;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrajectoryRecord> parse_records(std::string_view text, const std::string& source) {
  return records_from_table(csv::parse(text, source));
}

std::vector<TrajectoryRecord> read_records(const std::string& path) {
  return records_from_table(csv::read_file(path));
}

std::string write_records(std::span<const TrajectoryRecord> records) {
  std::string out = csv::join(kRecordsHeader) + "\n";
  for (const auto& r : records) {
    out += csv::join({r.student_id, std::to_string(r.term.year), std::to_string(r.term.half), r.course_code,
                      std::string(to_string(r.outcome)), grade_text(r.grade)});
    out += '\n';
  }
  return out;
}

static std::vector<StudentProfile> profiles_from_table(const csv::Table& table) {
  csv::require_header(table, kProfilesHeader);
  std::vector<StudentProfile> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string location = table.location(i);
    StudentProfile p;
    p.student_id = row[0];
    if (p.student_id.empty()) throw InputError(location, "empty student_id");
    if (!seen.insert(p.student_id).second) throw InputError(location, "duplicate profile for '" + p.student_id + "'");
    p.cohort_year = static_cast<int>(csv::parse_int(row[1], location));
    p.hs_graduation_year = static_cast<int>(csv::parse_int(row[2], location));
    p.age_at_entry = csv::parse_double(row[3], location);
    p.gender = row[4];
    p.graduated = parse_flag(row[5], location);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<StudentProfile> parse_profiles(std::string_view text, const std::string& source) {
  return profiles_from_table(csv::parse(text, source));
}

std::vector<StudentProfile> read_profiles(const std::string& path) {
  return profiles_from_table(csv::read_file(path));
}

std::string write_profiles(std::span<const StudentProfile> profiles) {
  std::string out = csv::join(kProfilesHeader) + "\n";
  for (const auto& p : profiles) {
    out += csv::join({p.student_id, std::to_string(p.cohort_year), std::to_string(p.hs_graduation_year),
                      csv::fixed(p.age_at_entry, 2), p.gender,
                      p.graduated ? (*p.graduated ? "true" : "false") : ""});
    out += '\n';
  }
  return out;
}

CurriculumDocument prune_by_frequency(const CurriculumDocument& doc, std::span<const TrajectoryRecord> records,
                                      std::size_t min_students) {
  std::map<std::string, std::set<std::string>, std::less<>> takers;
  for (const auto& r : records) takers[r.course_code].insert(r.student_id);
  CurriculumDocument out;
  out.warnings = doc.warnings;
  std::set<std::string, std::less<>> kept;
  for (const Course& c : doc.courses) {
    auto it = takers.find(c.code);
    const std::size_t count = it == takers.end() ? 0 : it->second.size();
    if (count >= min_students) {
      out.courses.push_back(c);
      kept.insert(c.code);
    } else {
      out.warnings.push_back("pruned course '" + c.code + "' (" + std::to_string(count) + " students)");
    }
  }
  for (const auto& e : doc.prerequisites)
    if (kept.contains(e.from) && kept.contains(e.to)) out.prerequisites.push_back(e);
  return out;
}

CourseSet StudentHistory::approved_at(int term) const {
  if (rows.empty()) return CourseSet();
  if (term <= 0) return CourseSet(rows.front().approved.universe());
  const auto index = static_cast<std::size_t>(std::min(term, last_term())) - 1;
  return rows[index].approved;
}

StudentHistory StudentHistory::truncated(int term) const {
  StudentHistory out;
  out.profile = profile;
  out.entry = entry;
  for (const auto& row : rows)
    if (row.term_index <= term) out.rows.push_back(row);
  if (graduation_term && *graduation_term <= term) {
    out.graduated = graduated;
    out.graduation_term = graduation_term;
  }
  out.profile.graduated.reset();
  if (out.graduated) out.profile.graduated = true;
  return out;
}

StudentSemesterPanel::StudentSemesterPanel(const CurriculumGraph& graph, std::vector<StudentHistory> students,
                                           PanelStats stats, std::vector<std::string> warnings)
    : graph_(&graph), students_(std::move(students)), stats_(stats), warnings_(std::move(warnings)) {
  std::sort(students_.begin(), students_.end(),
            [](const StudentHistory& a, const StudentHistory& b) { return a.id() < b.id(); });
  for (std::size_t i = 0; i < students_.size(); ++i) index_.emplace(students_[i].id(), i);
}

const StudentHistory& StudentSemesterPanel::student(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValidationError("unknown student '" + std::string(id) + "'");
  return students_[it->second];
}

CalendarTerm StudentSemesterPanel::latest_term() const {
  CalendarTerm latest;
  for (const auto& s : students_)
    for (const auto& row : s.rows)
      if (row.active() && latest < row.calendar) latest = row.calendar;
  return latest;
}

std::string StudentSemesterPanel::to_csv() const {
  std::set<std::pair<std::string, int>> eligible;
  for (auto& p : apply_filters(*this)) eligible.emplace(p.student_id, p.term_index);
  std::string out = "student_id,term_index,year,half,enrolments,exams,passes,approved_count,active,prediction_row\n";
  for (const auto& s : students_) {
    for (const auto& row : s.rows) {
      std::size_t enrolments = 0, exams = 0, passes = 0;
      for (const auto& e : row.events) {
        if (is_enrolment(e.outcome)) ++enrolments;
        if (is_exam(e.outcome)) ++exams;
        if (is_passing(e.outcome)) ++passes;
      }
      out += csv::join({s.id(), std::to_string(row.term_index), std::to_string(row.calendar.year),
                        std::to_string(row.calendar.half), std::to_string(enrolments), std::to_string(exams),
                        std::to_string(passes), std::to_string(row.approved.size()), row.active() ? "1" : "0",
                        eligible.contains({s.id(), row.term_index}) ? "1" : "0"});
      out += '\n';
    }
  }
  return out;
}

StudentSemesterPanel build_panel(std::span<const TrajectoryRecord> records, std::span<const StudentProfile> profiles,
                                 const CurriculumGraph& graph) {
  PanelStats stats;
  std::vector<std::string> warnings;
  stats.records_read = records.size();
  stats.profiles_read = profiles.size();

  // Quarantine invalid records, then keep the most recent entry per key.
  using Key = std::tuple<std::string, int, CourseId>;
  std::map<Key, const TrajectoryRecord*> latest;
  for (const auto& r : records) {
    const auto course = graph.find(r.course_code);
    if (!course) {
      ++stats.records_quarantined;
      warnings.push_back("quarantined record of '" + r.student_id + "' in " + r.term.to_string() +
                         ": unknown course '" + r.course_code + "'");
      continue;
    }
    if (r.grade.has_value() != is_graded(r.outcome) || (r.grade && (*r.grade < 0.0 || *r.grade > 10.0))) {
      ++stats.records_quarantined;
      warnings.push_back("quarantined record of '" + r.student_id + "' in " + r.term.to_string() + " for '" +
                         r.course_code + "': grade inconsistent with outcome " + std::string(to_string(r.outcome)));
      continue;
    }
    Key key{r.student_id, r.term.ordinal(), *course};
    auto [it, inserted] = latest.emplace(key, &r);
    if (inserted) continue;
    ++stats.duplicates_resolved;
    const TrajectoryRecord* current = it->second;
    if (r.sequence > current->sequence) {
      it->second = &r;
    } else if (r.sequence == current->sequence && r.outcome != current->outcome) {
      ++stats.precedence_resolutions;
      if (precedence(r.outcome) < precedence(current->outcome)) it->second = &r;
      warnings.push_back("conflicting duplicates for '" + r.student_id + "' " + r.term.to_string() + " '" +
                         r.course_code + "' resolved to " + std::string(to_string(it->second->outcome)));
    }
  }

  std::map<std::string, std::vector<const TrajectoryRecord*>, std::less<>> by_student;
  for (const auto& [key, rec] : latest) by_student[std::get<0>(key)].push_back(rec);
  std::map<std::string, const StudentProfile*, std::less<>> profile_of;
  for (const auto& p : profiles) profile_of.emplace(p.student_id, &p);

  for (const auto& [id, profile] : profile_of) {
    if (!by_student.contains(id)) {
      ++stats.students_without_records;
      warnings.push_back("student '" + id + "' has no records; excluded");
    }
  }

  std::vector<StudentHistory> students;
  const std::size_t n = graph.size();
  for (auto& [id, recs] : by_student) {
    auto pit = profile_of.find(id);
    if (pit == profile_of.end()) {
      ++stats.students_without_profile;
      warnings.push_back("student '" + id + "' has records but no profile; excluded");
      continue;
    }
    std::sort(recs.begin(), recs.end(), [&](const TrajectoryRecord* a, const TrajectoryRecord* b) {
      return std::make_tuple(a->term.ordinal(), graph.id_of(a->course_code)) <
             std::make_tuple(b->term.ordinal(), graph.id_of(b->course_code));
    });
    const CalendarTerm entry = recs.front()->term;
    if (pit->second->cohort_year > entry.year) {
      ++stats.students_inconsistent_profile;
      warnings.push_back("student '" + id + "' has cohort year " + std::to_string(pit->second->cohort_year) +
                         " after first record in " + entry.to_string() + "; excluded");
      continue;
    }

    StudentHistory h;
    h.profile = *pit->second;
    h.entry = entry;
    const int last = recs.back()->term.ordinal() - entry.ordinal() + 1;
    h.rows.resize(static_cast<std::size_t>(last));
    for (int t = 1; t <= last; ++t) {
      h.rows[t - 1].term_index = t;
      h.rows[t - 1].calendar = entry.plus(t - 1);
    }
    std::vector<int> passed_in(n, 0);
    bool implausible = false;
    for (const TrajectoryRecord* r : recs) {
      const int t = r->term.ordinal() - entry.ordinal() + 1;
      const CourseId course = graph.id_of(r->course_code);
      h.rows[t - 1].events.push_back({course, r->outcome, r->grade});
      if (is_passing(r->outcome)) {
        if (passed_in[course] != 0 && passed_in[course] != t) implausible = true;
        passed_in[course] = t;
      }
    }
    if (implausible) {
      ++stats.students_implausible;
      warnings.push_back("student '" + id + "' passes the same course in different terms; excluded");
      continue;
    }
    CourseSet approved(n);
    for (auto& row : h.rows) {
      for (const auto& e : row.events)
        if (is_passing(e.outcome)) approved.insert(e.course);
      row.approved = approved;
    }

    std::optional<int> covered_at;
    for (const auto& row : h.rows) {
      bool all = true;
      for (CourseId v = 0; v < n && all; ++v)
        if (graph.course(v).required && !row.approved.contains(v)) all = false;
      if (all) {
        covered_at = row.term_index;
        break;
      }
    }
    if (h.profile.graduated.has_value()) {
      h.graduated = *h.profile.graduated;
    } else {
      h.graduated = covered_at.has_value();
    }
    if (h.graduated) h.graduation_term = covered_at.value_or(h.last_term());

    stats.rows += h.rows.size();
    students.push_back(std::move(h));
  }
  stats.students = students.size();
  StudentSemesterPanel panel(graph, std::move(students), stats, std::move(warnings));
  return panel;
}

CourseSet approved_set(const StudentSemesterPanel& panel, std::string_view id, int term) {
  return panel.student(id).approved_at(term);
}

std::vector<PredictionRow> apply_filters(const StudentSemesterPanel& panel) {
  std::vector<PredictionRow> out;
  for (const auto& s : panel.students()) {
    const int last = s.last_term();
    for (int t = 2; t <= last; ++t) {
      if (s.graduated && t == last) continue;
      out.push_back({s.id(), t});
    }
  }
  return out;
}

SnapshotSet snapshot_at(const StudentSemesterPanel& panel, int ref_term, const ObservationWindow& window) {
  if (ref_term < 2) throw ValidationError("reference term must be >= 2");
  SnapshotSet out;
  for (const auto& s : panel.students()) {
    const CalendarTerm ref_calendar = s.entry.plus(ref_term - 1);
    if (ref_calendar > window.end) {
      ++out.excluded_late_entry;
      continue;
    }
    bool active_before = false, active_after = false;
    for (const auto& row : s.rows) {
      if (!row.active()) continue;
      if (row.term_index <= ref_term) active_before = true;
      if (row.term_index > ref_term) active_after = true;
    }
    if (!active_before) continue;
    Snapshot snap;
    snap.ref_term = ref_term;
    snap.label = (!active_after && !s.graduated) ? Label::Dropout : Label::Persist;
    snap.censored = window.end.ordinal() - ref_calendar.ordinal() < window.min_followup_terms;
    if (snap.censored) ++out.censored;
    snap.history = s.truncated(ref_term);
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

}  // namespace capire
