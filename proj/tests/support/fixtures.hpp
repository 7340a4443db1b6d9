#pragma once

#include <string>
#include <utility>
#include <vector>

#include "capire/curriculum.hpp"

namespace capire::fixtures {

inline Course course(std::string code, std::string module, std::int64_t credits, bool entry = false,
                     bool capstone = false) {
  Course c;
  c.code = code;
  c.name = "Course " + code;
  c.module = std::move(module);
  c.credits = Credits(credits);
  c.is_entry = entry;
  c.is_capstone = capstone;
  return c;
}

inline CurriculumDocument document(std::vector<Course> courses,
                                   std::vector<std::pair<std::string, std::string>> edges) {
  CurriculumDocument doc;
  doc.courses = std::move(courses);
  for (auto& [from, to] : edges) doc.prerequisites.push_back({from, to});
  return doc;
}

/// A(4, m1, entry) -> B(5, m2), C(6, m2) -> D(3, m3, capstone).
inline CurriculumDocument diamond() {
  return document({course("A", "m1", 4, true), course("B", "m2", 5), course("C", "m2", 6),
                   course("D", "m3", 3, false, true)},
                  {{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}});
}

/// A -> B -> C with credits 4/5/6.
inline CurriculumDocument chain() {
  return document({course("A", "m1", 4), course("B", "m1", 5), course("C", "m1", 6)}, {{"A", "B"}, {"B", "C"}});
}

/// A -> {B, C, D}, B -> E.
inline CurriculumDocument star_with_tail() {
  return document({course("A", "m1", 4), course("B", "m1", 4), course("C", "m1", 4), course("D", "m1", 4),
                   course("E", "m1", 4)},
                  {{"A", "B"}, {"A", "C"}, {"A", "D"}, {"B", "E"}});
}

inline const char* kDiamondJson = R"({
  "courses": [
    {"code": "A", "name": "Intro", "module": "m1", "credits": 4, "entry": true},
    {"code": "B", "name": "Left", "module": "m2", "credits": 5},
    {"code": "C", "name": "Right", "module": "m2", "credits": 6},
    {"code": "D", "name": "Capstone", "module": "m3", "credits": 3, "capstone": true}
  ],
  "prerequisites": [
    {"from": "A", "to": "B"}, {"from": "A", "to": "C"},
    {"from": "B", "to": "D"}, {"from": "C", "to": "D"}
  ]
})";

}  // namespace capire::fixtures
