#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace capire {

/// Exact non-negative rational credit value (plans may use half credits).
class Credits {
 public:
  constexpr Credits() = default;
  Credits(std::int64_t numerator, std::int64_t denominator = 1);

  /// Accepts "5", "4.5", "9/2".
  static Credits parse(std::string_view text);
  /// Accepts decimal values representable with a denominator up to 1000.
  static Credits from_double(double value);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool positive() const { return num_ > 0; }

  std::string to_string() const;

  Credits& operator+=(const Credits& other);
  friend Credits operator+(Credits lhs, const Credits& rhs) { return lhs += rhs; }
  friend bool operator==(const Credits&, const Credits&) = default;
  friend bool operator<(const Credits& a, const Credits& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator<=(const Credits& a, const Credits& b) { return !(b < a); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace capire
