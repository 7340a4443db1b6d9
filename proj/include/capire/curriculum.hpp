#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capire/course_set.hpp"
#include "capire/credits.hpp"
#include "capire/errors.hpp"

namespace capire {

struct Course {
  std::string code;
  std::string name;
  std::string module;
  Credits credits{1};
  bool is_entry = false;
  bool is_capstone = false;
  /// Eligible for direct promotion (used by the promotable direct-pass ratio).
  bool promotable = true;
  /// Counts towards graduation by full coverage.
  bool required = true;

  friend bool operator==(const Course&, const Course&) = default;
};

/// `from` is a prerequisite of `to`.
struct PrerequisiteEdge {
  std::string from;
  std::string to;

  friend bool operator==(const PrerequisiteEdge&, const PrerequisiteEdge&) = default;
  friend auto operator<=>(const PrerequisiteEdge&, const PrerequisiteEdge&) = default;
};

/// Curriculum as read from disk, before structural validation.
struct CurriculumDocument {
  std::vector<Course> courses;
  std::vector<PrerequisiteEdge> prerequisites;
  std::vector<std::string> warnings;
};

class CurriculumError : public InputError {
 public:
  enum class Kind { Malformed, DuplicateCourse, UnknownCourse, SelfLoop, DuplicateEdge, Cycle, Unreachable };

  CurriculumError(Kind kind, std::string location, const std::string& message,
                  std::vector<std::string> witness = {})
      : InputError(std::move(location), message), kind_(kind), witness_(std::move(witness)) {}

  Kind kind() const { return kind_; }
  /// Cycle: ordered codes with the first repeated at the end. Unreachable: the
  /// offending code. Otherwise the codes involved, if any.
  const std::vector<std::string>& witness() const { return witness_; }

 private:
  Kind kind_;
  std::vector<std::string> witness_;
};

/// Parses the JSON curriculum format: `courses` [{code, name, module, credits,
/// entry?, capstone?, promotable?, required?}] and `prerequisites` [{from, to}].
/// Unknown fields are kept as warnings on the returned document.
CurriculumDocument parse_curriculum_document(std::string_view text, const std::string& source = "<curriculum>");
CurriculumDocument read_curriculum_document(const std::string& path);
std::string serialize_curriculum(const CurriculumDocument& doc);

/// Deterministic topological order (ties broken by lexicographic code).
/// Throws CurriculumError for unknown endpoints, self-loops, duplicates or a
/// cycle (witness attached).
std::vector<std::string> validate_dag(std::span<const Course> courses,
                                      std::span<const PrerequisiteEdge> edges);

struct BuildOptions {
  /// Reject courses that are not on some entry-to-terminal route.
  bool require_reachability = true;
};

/// Validated, immutable prerequisite DAG. Course ids follow code order.
class CurriculumGraph {
 public:
  static CurriculumGraph build(CurriculumDocument doc, BuildOptions options = {});

  std::size_t size() const { return courses_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const Course& course(CourseId id) const { return courses_.at(id); }
  std::span<const Course> courses() const { return courses_; }
  std::optional<CourseId> find(std::string_view code) const;
  /// Throws ValidationError for an unknown code.
  CourseId id_of(std::string_view code) const;

  std::span<const CourseId> successors(CourseId id) const { return successors_[id]; }
  std::span<const CourseId> predecessors(CourseId id) const { return predecessors_[id]; }
  std::size_t in_degree(CourseId id) const { return predecessors_[id].size(); }
  std::size_t out_degree(CourseId id) const { return successors_[id].size(); }
  /// Edges sorted by (from id, to id).
  std::span<const std::pair<CourseId, CourseId>> edges() const { return edges_; }

  std::span<const CourseId> topological_order() const { return topo_; }
  std::span<const CourseId> entries() const { return entries_; }
  std::span<const CourseId> terminals() const { return terminals_; }

  std::vector<std::string> codes(std::span<const CourseId> ids) const;
  CourseSet make_set(std::span<const std::string> codes) const;
  CurriculumDocument document() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  CurriculumGraph() = default;

  std::vector<Course> courses_;
  std::map<std::string, CourseId, std::less<>> index_;
  std::vector<std::pair<CourseId, CourseId>> edges_;
  std::vector<std::vector<CourseId>> successors_;
  std::vector<std::vector<CourseId>> predecessors_;
  std::vector<CourseId> topo_;
  std::vector<CourseId> entries_;
  std::vector<CourseId> terminals_;
  std::vector<std::string> warnings_;
};

CurriculumGraph parse_curriculum(std::string_view text, const std::string& source = "<curriculum>",
                                 BuildOptions options = {});
CurriculumGraph load_curriculum(const std::string& path, BuildOptions options = {});

struct ReachabilityEntry {
  std::string code;
  bool reachable_from_entry = false;
  bool coreachable_to_terminal = false;
};

struct ReachabilityReport {
  std::vector<ReachabilityEntry> courses;  // in code order

  std::vector<ReachabilityEntry> violators() const;
  bool all_valid() const { return violators().empty(); }
};

ReachabilityReport reachability_report(const CurriculumGraph& graph);

/// Edges (i, j) for which another directed path i -> ... -> j exists.
std::vector<PrerequisiteEdge> transitive_redundancy(const CurriculumGraph& graph);

}  // namespace capire
