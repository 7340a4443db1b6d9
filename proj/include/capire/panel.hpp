#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capire/course_set.hpp"
#include "capire/curriculum.hpp"

namespace capire {

enum class Outcome { Promoted, Regularized, PassedExam, FailedExam, Libre, EnrolledOnly };

std::string_view to_string(Outcome outcome);
/// Throws ValidationError for an unknown name.
Outcome parse_outcome(std::string_view text);

/// Course passed (enters the approved set).
constexpr bool is_passing(Outcome o) { return o == Outcome::Promoted || o == Outcome::PassedExam; }
/// Carries a grade.
constexpr bool is_graded(Outcome o) {
  return o == Outcome::Promoted || o == Outcome::PassedExam || o == Outcome::FailedExam;
}
constexpr bool is_exam(Outcome o) { return o == Outcome::PassedExam || o == Outcome::FailedExam; }
/// A course taking (cursada), as opposed to a final-exam attempt.
constexpr bool is_enrolment(Outcome o) { return !is_exam(o); }

/// Calendar semester; half is 1 or 2.
struct CalendarTerm {
  int year = 0;
  int half = 1;

  int ordinal() const { return year * 2 + (half - 1); }
  static CalendarTerm from_ordinal(int ordinal) { return {ordinal / 2, ordinal % 2 + 1}; }
  CalendarTerm plus(int terms) const { return from_ordinal(ordinal() + terms); }
  /// "2024-2"
  std::string to_string() const;
  static CalendarTerm parse(std::string_view text);

  friend auto operator<=>(const CalendarTerm&, const CalendarTerm&) = default;
};

struct TrajectoryRecord {
  std::string student_id;
  CalendarTerm term;
  std::string course_code;
  Outcome outcome = Outcome::EnrolledOnly;
  std::optional<double> grade;
  /// Recency: a larger value supersedes a smaller one for the same
  /// (student, term, course). File readers use the row position.
  std::uint64_t sequence = 0;
};

struct StudentProfile {
  std::string student_id;
  int cohort_year = 0;
  int hs_graduation_year = 0;
  double age_at_entry = 0.0;
  std::string gender;
  /// Explicit institutional graduation record, when available.
  std::optional<bool> graduated;
};

inline const std::vector<std::string> kRecordsHeader = {"student_id", "year", "half", "course_code", "outcome", "grade"};
inline const std::vector<std::string> kProfilesHeader = {"student_id",    "cohort_year", "hs_graduation_year",
                                                         "age_at_entry",  "gender",      "graduated"};

std::vector<TrajectoryRecord> parse_records(std::string_view text, const std::string& source = "<records>");
std::vector<TrajectoryRecord> read_records(const std::string& path);
std::string write_records(std::span<const TrajectoryRecord> records);

std::vector<StudentProfile> parse_profiles(std::string_view text, const std::string& source = "<profiles>");
std::vector<StudentProfile> read_profiles(const std::string& path);
std::string write_profiles(std::span<const StudentProfile> profiles);

/// Drops courses taken by fewer than `min_students` distinct students, along
/// with their prerequisite edges.
CurriculumDocument prune_by_frequency(const CurriculumDocument& doc, std::span<const TrajectoryRecord> records,
                                      std::size_t min_students = 1);

struct CourseEvent {
  CourseId course = 0;
  Outcome outcome = Outcome::EnrolledOnly;
  std::optional<double> grade;
};

/// One programme semester of one student. `approved` is S_{i,t}: cumulative
/// passes at the end of this term.
struct TermRow {
  int term_index = 0;
  CalendarTerm calendar;
  std::vector<CourseEvent> events;
  CourseSet approved;

  bool active() const { return !events.empty(); }
};

struct StudentHistory {
  StudentProfile profile;
  CalendarTerm entry;
  std::vector<TermRow> rows;  // term_index 1..last, contiguous
  bool graduated = false;
  std::optional<int> graduation_term;

  const std::string& id() const { return profile.student_id; }
  int last_term() const { return rows.empty() ? 0 : rows.back().term_index; }
  /// S_{i,t}; empty for t <= 0, frozen at the last observed term beyond it.
  CourseSet approved_at(int term) const;
  /// Copy holding only terms 1..term, with graduation kept only if reached by then.
  StudentHistory truncated(int term) const;
};

/// Row counts at every ingestion stage.
struct PanelStats {
  std::size_t records_read = 0;
  std::size_t records_quarantined = 0;
  std::size_t duplicates_resolved = 0;
  std::size_t precedence_resolutions = 0;
  std::size_t profiles_read = 0;
  std::size_t students_without_records = 0;
  std::size_t students_without_profile = 0;
  std::size_t students_inconsistent_profile = 0;
  std::size_t students_implausible = 0;
  std::size_t students = 0;
  std::size_t rows = 0;
  std::size_t prediction_rows = 0;
};

class StudentSemesterPanel {
 public:
  StudentSemesterPanel(const CurriculumGraph& graph, std::vector<StudentHistory> students, PanelStats stats,
                       std::vector<std::string> warnings);

  const CurriculumGraph& graph() const { return *graph_; }
  std::span<const StudentHistory> students() const { return students_; }
  /// Throws ValidationError for an unknown student.
  const StudentHistory& student(std::string_view id) const;
  bool contains(std::string_view id) const { return index_.find(id) != index_.end(); }
  const PanelStats& stats() const { return stats_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Latest calendar term with any record.
  CalendarTerm latest_term() const;

  /// Panel rows as delimited text (one row per student-term).
  std::string to_csv() const;

 private:
  const CurriculumGraph* graph_;
  std::vector<StudentHistory> students_;
  std::map<std::string, std::size_t, std::less<>> index_;
  PanelStats stats_;
  std::vector<std::string> warnings_;
};

StudentSemesterPanel build_panel(std::span<const TrajectoryRecord> records, std::span<const StudentProfile> profiles,
                                 const CurriculumGraph& graph);

/// S_{i,t} for student `id`; t = 0 gives the empty set.
CourseSet approved_set(const StudentSemesterPanel& panel, std::string_view id, int term);

struct PredictionRow {
  std::string student_id;
  int term_index = 0;
  friend bool operator==(const PredictionRow&, const PredictionRow&) = default;
};

/// Student-terms eligible for prediction: drops term 1 for everyone and the
/// final observed term of graduates. History is left untouched.
std::vector<PredictionRow> apply_filters(const StudentSemesterPanel& panel);

struct ObservationWindow {
  CalendarTerm end;
  /// Snapshots with fewer observable terms after the reference term are censored.
  int min_followup_terms = 2;
};

enum class Label { Persist = 0, Dropout = 1 };

struct Snapshot {
  int ref_term = 0;
  Label label = Label::Persist;
  bool censored = false;
  /// History up to and including ref_term only.
  StudentHistory history;

  const std::string& student_id() const { return history.id(); }
};

struct SnapshotSet {
  std::vector<Snapshot> snapshots;  // in student id order
  std::size_t excluded_late_entry = 0;
  std::size_t censored = 0;
};

/// Throws ValidationError when ref_term < 2.
SnapshotSet snapshot_at(const StudentSemesterPanel& panel, int ref_term, const ObservationWindow& window);

}  // namespace capire
