#include "capire/credits.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "capire/errors.hpp"

namespace capire {

namespace {

std::int64_t parse_integer(std::string_view text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("invalid credit value '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Credits::Credits(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw ValidationError("credit denominator is zero");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const std::int64_t g = std::gcd(numerator, denominator);
  num_ = g ? numerator / g : 0;
  den_ = g ? denominator / g : 1;
}

Credits Credits::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Credits(parse_integer(text.substr(0, slash)), parse_integer(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto whole = text.substr(0, dot);
    const auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 9) {
      throw ValidationError("invalid credit value '" + std::string(text) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::int64_t w = whole.empty() ? 0 : parse_integer(whole);
    return Credits(w * scale + parse_integer(frac), scale);
  }
  return Credits(parse_integer(text));
}

Credits Credits::from_double(double value) {
  if (!std::isfinite(value)) throw ValidationError("credit value is not finite");
  for (std::int64_t den = 1; den <= 1000; ++den) {
    const double scaled = value * static_cast<double>(den);
    const double rounded = std::round(scaled);
    if (std::fabs(scaled - rounded) < 1e-9 * std::max(1.0, std::fabs(scaled))) {
      return Credits(static_cast<std::int64_t>(rounded), den);
    }
  }
  throw ValidationError("credit value " + std::to_string(value) +
                        " is not a rational with denominator <= 1000");
}

std::string Credits::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Credits& Credits::operator+=(const Credits& other) {
  *this = Credits(num_ * other.den_ + other.num_ * den_, den_ * other.den_);
  return *this;
}

ConvergenceError::ConvergenceError(int iterations, double residual)
    : Error("power iteration did not converge after " + std::to_string(iterations) +
            " iterations (residual " + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

}  // namespace capire
