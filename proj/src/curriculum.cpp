#include "capire/curriculum.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace capire {

namespace {

using Json = nlohmann::ordered_json;
using Kind = CurriculumError::Kind;

const std::set<std::string> kCourseFields = {"code",     "name",       "module",   "credits", "entry",
                                             "capstone", "promotable", "required"};
const std::set<std::string> kEdgeFields = {"from", "to"};

std::string element_location(const std::string& source, const char* array, std::size_t index) {
  return source + ":" + array + "[" + std::to_string(index) + "]";
}

std::string require_string(const Json& obj, const char* key, const std::string& location) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw CurriculumError(Kind::Malformed, location, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

bool optional_bool(const Json& obj, const char* key, bool fallback, const std::string& location) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    throw CurriculumError(Kind::Malformed, location, std::string("field '") + key + "' must be a boolean");
  }
  return it->get<bool>();
}

Credits parse_credits(const Json& obj, const std::string& location) {
  auto it = obj.find("credits");
  if (it == obj.end()) throw CurriculumError(Kind::Malformed, location, "field 'credits' is required");
  try {
    if (it->is_number_integer()) return Credits(it->get<std::int64_t>());
    if (it->is_number()) return Credits::from_double(it->get<double>());
    if (it->is_string()) return Credits::parse(it->get<std::string>());
  } catch (const ValidationError& e) {
    throw CurriculumError(Kind::Malformed, location, e.what());
  }
  throw CurriculumError(Kind::Malformed, location, "field 'credits' must be a number or a rational string");
}

void check_courses(std::span<const Course> courses) {
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < courses.size(); ++i) {
    const Course& c = courses[i];
    const std::string location = "courses[" + std::to_string(i) + "]";
    if (c.code.empty()) throw CurriculumError(Kind::Malformed, location, "course code is empty");
    if (c.module.empty()) {
      throw CurriculumError(Kind::Malformed, location, "course '" + c.code + "' has an empty module", {c.code});
    }
    if (!c.credits.positive()) {
      throw CurriculumError(Kind::Malformed, location, "course '" + c.code + "' must have credits > 0", {c.code});
    }
    if (!seen.insert(c.code).second) {
      throw CurriculumError(Kind::DuplicateCourse, location, "duplicate course code '" + c.code + "'", {c.code});
    }
  }
}

// Walks predecessors inside the unresolved remainder of Kahn's algorithm until
// a node repeats. Every remaining node has a remaining predecessor.
std::vector<std::string> find_witness_cycle(const std::vector<std::string>& codes,
                                            const std::vector<std::vector<std::size_t>>& preds,
                                            const std::vector<std::size_t>& indegree) {
  std::size_t start = codes.size();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (indegree[i] > 0) {
      start = i;
      break;
    }
  }
  std::vector<std::size_t> walk;
  std::vector<std::size_t> position(codes.size(), codes.size());
  std::size_t current = start;
  while (position[current] == codes.size()) {
    position[current] = walk.size();
    walk.push_back(current);
    std::size_t next = codes.size();
    for (std::size_t p : preds[current]) {
      if (indegree[p] > 0) {
        next = p;
        break;
      }
    }
    current = next;
  }
  // walk[position[current]..] traverses the cycle backwards.
  std::vector<std::size_t> cycle(walk.begin() + static_cast<std::ptrdiff_t>(position[current]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  auto smallest = std::min_element(cycle.begin(), cycle.end(),
                                   [&](std::size_t a, std::size_t b) { return codes[a] < codes[b]; });
  std::rotate(cycle.begin(), smallest, cycle.end());
  std::vector<std::string> out;
  for (std::size_t v : cycle) out.push_back(codes[v]);
  out.push_back(out.front());
  return out;
}

std::vector<char> bfs_mark(std::size_t n, std::span<const CourseId> seeds,
                           const std::vector<std::vector<CourseId>>& adjacency) {
  std::vector<char> seen(n, 0);
  std::queue<CourseId> queue;
  for (CourseId s : seeds) {
    if (!seen[s]) {
      seen[s] = 1;
      queue.push(s);
    }
  }
  while (!queue.empty()) {
    const CourseId v = queue.front();
    queue.pop();
    for (CourseId w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push(w);
      }
    }
  }
  return seen;
}

}  // namespace

CurriculumDocument parse_curriculum_document(std::string_view text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw CurriculumError(Kind::Malformed, source + ":byte " + std::to_string(e.byte),
                          "invalid JSON: " + std::string(e.what()));
  }
  if (!root.is_object()) throw CurriculumError(Kind::Malformed, source, "top level must be an object");

  CurriculumDocument doc;
  for (const auto& [key, value] : root.items()) {
    if (key != "courses" && key != "prerequisites") {
      doc.warnings.push_back(source + ": ignoring unknown field '" + key + "'");
    }
  }
  auto courses = root.find("courses");
  if (courses == root.end() || !courses->is_array()) {
    throw CurriculumError(Kind::Malformed, source, "'courses' must be an array");
  }
  for (std::size_t i = 0; i < courses->size(); ++i) {
    const Json& obj = (*courses)[i];
    const std::string location = element_location(source, "courses", i);
    if (!obj.is_object()) throw CurriculumError(Kind::Malformed, location, "course must be an object");
    for (const auto& [key, value] : obj.items()) {
      if (!kCourseFields.contains(key)) doc.warnings.push_back(location + ": ignoring unknown field '" + key + "'");
    }
    Course c;
    c.code = require_string(obj, "code", location);
    c.name = require_string(obj, "name", location);
    c.module = require_string(obj, "module", location);
    c.credits = parse_credits(obj, location);
    c.is_entry = optional_bool(obj, "entry", false, location);
    c.is_capstone = optional_bool(obj, "capstone", false, location);
    c.promotable = optional_bool(obj, "promotable", true, location);
    c.required = optional_bool(obj, "required", true, location);
    if (c.code.empty()) throw CurriculumError(Kind::Malformed, location, "course code is empty");
    if (c.module.empty()) throw CurriculumError(Kind::Malformed, location, "course '" + c.code + "' has an empty module");
    if (!c.credits.positive()) {
      throw CurriculumError(Kind::Malformed, location, "course '" + c.code + "' must have credits > 0");
    }
    doc.courses.push_back(std::move(c));
  }

  auto prereqs = root.find("prerequisites");
  if (prereqs != root.end()) {
    if (!prereqs->is_array()) throw CurriculumError(Kind::Malformed, source, "'prerequisites' must be an array");
    for (std::size_t i = 0; i < prereqs->size(); ++i) {
      const Json& obj = (*prereqs)[i];
      const std::string location = element_location(source, "prerequisites", i);
      if (!obj.is_object()) throw CurriculumError(Kind::Malformed, location, "prerequisite must be an object");
      for (const auto& [key, value] : obj.items()) {
        if (!kEdgeFields.contains(key)) doc.warnings.push_back(location + ": ignoring unknown field '" + key + "'");
      }
      doc.prerequisites.push_back({require_string(obj, "from", location), require_string(obj, "to", location)});
    }
  }
  return doc;
}

CurriculumDocument read_curriculum_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_curriculum_document(buffer.str(), path);
}

std::string serialize_curriculum(const CurriculumDocument& doc) {
  Json root;
  root["courses"] = Json::array();
  for (const Course& c : doc.courses) {
    Json obj;
    obj["code"] = c.code;
    obj["name"] = c.name;
    obj["module"] = c.module;
    if (c.credits.denominator() == 1) {
      obj["credits"] = c.credits.numerator();
    } else {
      obj["credits"] = c.credits.to_string();
    }
    if (c.is_entry) obj["entry"] = true;
    if (c.is_capstone) obj["capstone"] = true;
    if (!c.promotable) obj["promotable"] = false;
    if (!c.required) obj["required"] = false;
    root["courses"].push_back(std::move(obj));
  }
  root["prerequisites"] = Json::array();
  for (const PrerequisiteEdge& e : doc.prerequisites) {
    root["prerequisites"].push_back({{"from", e.from}, {"to", e.to}});
  }
  return root.dump(2) + "\n";
}

std::vector<std::string> validate_dag(std::span<const Course> courses, std::span<const PrerequisiteEdge> edges) {
  std::vector<std::string> codes;
  codes.reserve(courses.size());
  for (const Course& c : courses) codes.push_back(c.code);
  std::sort(codes.begin(), codes.end());
  for (std::size_t i = 1; i < codes.size(); ++i) {
    if (codes[i] == codes[i - 1]) {
      throw CurriculumError(Kind::DuplicateCourse, "", "duplicate course code '" + codes[i] + "'", {codes[i]});
    }
  }
  auto index_of = [&](const std::string& code, std::size_t edge_index) {
    auto it = std::lower_bound(codes.begin(), codes.end(), code);
    if (it == codes.end() || *it != code) {
      throw CurriculumError(Kind::UnknownCourse, "prerequisites[" + std::to_string(edge_index) + "]",
                            "unknown course code '" + code + "'", {code});
    }
    return static_cast<std::size_t>(it - codes.begin());
  };

  const std::size_t n = codes.size();
  std::vector<std::vector<std::size_t>> succ(n), pred(n);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::size_t a = index_of(edges[i].from, i);
    const std::size_t b = index_of(edges[i].to, i);
    const std::string location = "prerequisites[" + std::to_string(i) + "]";
    if (a == b) {
      throw CurriculumError(Kind::SelfLoop, location, "self-loop on '" + codes[a] + "'", {codes[a], codes[a]});
    }
    if (!seen.emplace(a, b).second) {
      throw CurriculumError(Kind::DuplicateEdge, location,
                            "duplicate prerequisite " + codes[a] + " -> " + codes[b], {codes[a], codes[b]});
    }
    succ[a].push_back(b);
    pred[b].push_back(a);
  }
  for (auto& p : pred) std::sort(p.begin(), p.end());

  std::vector<std::size_t> indegree(n);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = pred[v].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<std::string> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(codes[v]);
    for (std::size_t w : succ[v])
      if (--indegree[w] == 0) ready.push(w);
  }
  if (order.size() != n) {
    auto witness = find_witness_cycle(codes, pred, indegree);
    std::string text;
    for (std::size_t i = 0; i < witness.size(); ++i) text += (i ? " -> " : "") + witness[i];
    throw CurriculumError(Kind::Cycle, "", "prerequisite cycle: " + text, std::move(witness));
  }
  return order;
}

CurriculumGraph CurriculumGraph::build(CurriculumDocument doc, BuildOptions options) {
  check_courses(doc.courses);
  const auto order = validate_dag(doc.courses, doc.prerequisites);

  CurriculumGraph g;
  g.warnings_ = std::move(doc.warnings);
  g.courses_ = std::move(doc.courses);
  std::sort(g.courses_.begin(), g.courses_.end(), [](const Course& a, const Course& b) { return a.code < b.code; });
  const std::size_t n = g.courses_.size();
  for (std::size_t i = 0; i < n; ++i) g.index_.emplace(g.courses_[i].code, static_cast<CourseId>(i));

  g.successors_.resize(n);
  g.predecessors_.resize(n);
  for (const PrerequisiteEdge& e : doc.prerequisites) {
    const CourseId a = g.index_.find(e.from)->second;
    const CourseId b = g.index_.find(e.to)->second;
    g.edges_.emplace_back(a, b);
    g.successors_[a].push_back(b);
    g.predecessors_[b].push_back(a);
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  for (auto& s : g.successors_) std::sort(s.begin(), s.end());
  for (auto& p : g.predecessors_) std::sort(p.begin(), p.end());
  for (const std::string& code : order) g.topo_.push_back(g.index_.find(code)->second);

  for (CourseId v = 0; v < n; ++v) {
    if (g.courses_[v].is_entry) g.entries_.push_back(v);
    if (g.courses_[v].is_capstone) g.terminals_.push_back(v);
  }
  if (g.entries_.empty()) {
    for (CourseId v = 0; v < n; ++v)
      if (g.predecessors_[v].empty()) g.entries_.push_back(v);
  }
  if (g.terminals_.empty()) {
    for (CourseId v = 0; v < n; ++v)
      if (g.successors_[v].empty()) g.terminals_.push_back(v);
  }

  if (options.require_reachability) {
    const auto forward = bfs_mark(n, g.entries_, g.successors_);
    const auto backward = bfs_mark(n, g.terminals_, g.predecessors_);
    for (CourseId v = 0; v < n; ++v) {
      const std::string& code = g.courses_[v].code;
      if (!forward[v]) {
        throw CurriculumError(Kind::Unreachable, "", "course '" + code + "' is not reachable from any entry course",
                              {code});
      }
      if (!backward[v]) {
        throw CurriculumError(Kind::Unreachable, "", "course '" + code + "' cannot reach any terminal course", {code});
      }
    }
  }
  return g;
}

std::optional<CourseId> CurriculumGraph::find(std::string_view code) const {
  auto it = index_.find(code);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CourseId CurriculumGraph::id_of(std::string_view code) const {
  auto id = find(code);
  if (!id) throw ValidationError("unknown course code '" + std::string(code) + "'");
  return *id;
}

std::vector<std::string> CurriculumGraph::codes(std::span<const CourseId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (CourseId id : ids) out.push_back(courses_.at(id).code);
  return out;
}

CourseSet CurriculumGraph::make_set(std::span<const std::string> codes) const {
  CourseSet set(size());
  for (const std::string& code : codes) set.insert(id_of(code));
  return set;
}

CurriculumDocument CurriculumGraph::document() const {
  CurriculumDocument doc;
  doc.courses = courses_;
  for (auto [a, b] : edges_) doc.prerequisites.push_back({courses_[a].code, courses_[b].code});
  return doc;
}

CurriculumGraph parse_curriculum(std::string_view text, const std::string& source, BuildOptions options) {
  auto doc = parse_curriculum_document(text, source);
  try {
    return CurriculumGraph::build(std::move(doc), options);
  } catch (const CurriculumError& e) {
    if (!e.location().empty() && e.location().rfind(source, 0) == 0) throw;
    const std::string location = e.location().empty() ? source : source + ":" + e.location();
    std::string message = e.what();
    if (!e.location().empty()) message = message.substr(e.location().size() + 2);
    throw CurriculumError(e.kind(), location, message, e.witness());
  }
}

CurriculumGraph load_curriculum(const std::string& path, BuildOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_curriculum(buffer.str(), path, options);
}

std::vector<ReachabilityEntry> ReachabilityReport::violators() const {
  std::vector<ReachabilityEntry> out;
  for (const auto& entry : courses)
    if (!entry.reachable_from_entry || !entry.coreachable_to_terminal) out.push_back(entry);
  return out;
}

ReachabilityReport reachability_report(const CurriculumGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<std::vector<CourseId>> succ(n), pred(n);
  for (CourseId v = 0; v < n; ++v) {
    succ[v].assign(graph.successors(v).begin(), graph.successors(v).end());
    pred[v].assign(graph.predecessors(v).begin(), graph.predecessors(v).end());
  }
  const auto forward = bfs_mark(n, graph.entries(), succ);
  const auto backward = bfs_mark(n, graph.terminals(), pred);
  ReachabilityReport report;
  for (CourseId v = 0; v < n; ++v) {
    report.courses.push_back({graph.course(v).code, forward[v] != 0, backward[v] != 0});
  }
  return report;
}

std::vector<PrerequisiteEdge> transitive_redundancy(const CurriculumGraph& graph) {
  std::vector<PrerequisiteEdge> out;
  const std::size_t n = graph.size();
  std::vector<char> seen(n);
  for (auto [from, to] : graph.edges()) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<CourseId> stack;
    for (CourseId w : graph.successors(from)) {
      if (w != to) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
    bool found = false;
    while (!stack.empty() && !found) {
      const CourseId v = stack.back();
      stack.pop_back();
      for (CourseId w : graph.successors(v)) {
        if (w == to) {
          found = true;
          break;
        }
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    if (found) out.push_back({graph.course(from).code, graph.course(to).code});
  }
  return out;
}

}  // namespace capire
