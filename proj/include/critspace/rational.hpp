#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace critspace {

// Exact rational scalar used by all exponent algebra. Inputs that are
// genuinely irrational go through the double-based fallbacks of the
// individual operations instead.
using Rat = boost::rational<long long>;

inline Rat rat(long long num, long long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  return Rat(num, den);
}

inline double to_double(const Rat& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Parses "a", "a/b", or "-a/b".
inline Rat parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(text), 1);
    long long num = std::stoll(text.substr(0, slash));
    long long den = std::stoll(text.substr(slash + 1));
    return rat(num, den);
  } catch (const std::invalid_argument&) {
    throw std::domain_error("cannot parse rational: " + text);
  } catch (const std::out_of_range&) {
    throw std::domain_error("rational out of range: " + text);
  }
}

inline std::string format_rational(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace critspace
