#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace capire {

/// Dense index of a course inside a CurriculumGraph. Ids follow the
/// lexicographic order of course codes.
using CourseId = std::uint32_t;

/// Set of courses of one curriculum, stored as a membership mask.
class CourseSet {
 public:
  CourseSet() = default;
  explicit CourseSet(std::size_t universe) : mask_(universe, 0) {}

  static CourseSet full(std::size_t universe) {
    CourseSet s(universe);
    for (auto& m : s.mask_) m = 1;
    s.count_ = universe;
    return s;
  }

  std::size_t universe() const { return mask_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(CourseId id) const { return id < mask_.size() && mask_[id] != 0; }

  void insert(CourseId id) {
    if (!mask_[id]) {
      mask_[id] = 1;
      ++count_;
    }
  }

  void erase(CourseId id) {
    if (mask_[id]) {
      mask_[id] = 0;
      --count_;
    }
  }

  /// Members in ascending id order.
  std::vector<CourseId> members() const {
    std::vector<CourseId> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i]) out.push_back(static_cast<CourseId>(i));
    return out;
  }

  bool is_subset_of(const CourseSet& other) const {
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && !other.contains(static_cast<CourseId>(i))) return false;
    return true;
  }

  friend bool operator==(const CourseSet&, const CourseSet&) = default;

 private:
  std::vector<std::uint8_t> mask_;
  std::size_t count_ = 0;
};

}  // namespace capire
