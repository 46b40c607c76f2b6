#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace nullctl {

/// Arbitrary-precision rational used for every fluid-level quantity.
using Rational = boost::multiprecision::cpp_rational;

/// Parses a locale-independent decimal literal ("7.5", "-0.25", "1e-3", "3/4") exactly.
/// Throws SpecError on malformed input.
Rational parse_decimal(std::string_view text);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// "p/q" or "p" for integers.
std::string to_string(const Rational& r);

/// Nearest integer, ties away from zero.
boost::multiprecision::cpp_int round_nearest(const Rational& r);

boost::multiprecision::cpp_int floor(const Rational& r);
boost::multiprecision::cpp_int ceil(const Rational& r);

}  // namespace nullctl
