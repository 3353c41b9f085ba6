#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace idkit {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(std::uint64_t n) {
  BigInt f = 1;
  for (std::uint64_t k = 2; k <= n; ++k) f *= k;
  return f;
}

/// n! / m! for m <= n.
inline BigInt falling_ratio(std::uint64_t n, std::uint64_t m) {
  BigInt f = 1;
  for (std::uint64_t k = m + 1; k <= n; ++k) f *= k;
  return f;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

}  // namespace idkit
