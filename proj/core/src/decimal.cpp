#include "nullctl/errors.hpp"
#include "nullctl/rational.hpp"

#include <cctype>
#include <string>

namespace nullctl {

namespace mp = boost::multiprecision;

namespace {

mp::cpp_int pow10(long exp) {
  mp::cpp_int r = 1;
  for (long k = 0; k < exp; ++k) r *= 10;
  return r;
}

[[noreturn]] void bad(std::string_view text) {
  throw SpecError("malformed decimal literal: '" + std::string(text) + "'");
}

Rational parse_plain(std::string_view s, std::string_view whole) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    negative = s[pos] == '-';
    ++pos;
  }
  mp::cpp_int mantissa = 0;
  long scale = 0;
  bool digits = false;
  bool dot = false;
  for (; pos < s.size(); ++pos) {
    const char ch = s[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mantissa = mantissa * 10 + (ch - '0');
      digits = true;
      if (dot) ++scale;
    } else if (ch == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digits) bad(whole);
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') bad(whole);
    ++pos;
    bool exp_negative = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      exp_negative = s[pos] == '-';
      ++pos;
    }
    if (pos >= s.size()) bad(whole);
    for (; pos < s.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(s[pos]))) bad(whole);
      exponent = exponent * 10 + (s[pos] - '0');
      if (exponent > 4000) bad(whole);
    }
    if (exp_negative) exponent = -exponent;
  }
  const long net = exponent - scale;
  Rational r = net >= 0 ? Rational(mantissa * pow10(net)) : Rational(mantissa, pow10(-net));
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad(text);
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_plain(s.substr(0, slash), text);
    const Rational den = parse_plain(s.substr(slash + 1), text);
    if (den == 0) throw SpecError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_plain(s, text);
}

std::string to_string(const Rational& r) {
  if (mp::denominator(r) == 1) return mp::numerator(r).str();
  return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

mp::cpp_int floor(const Rational& r) {
  const mp::cpp_int& num = mp::numerator(r);
  const mp::cpp_int& den = mp::denominator(r);
  mp::cpp_int q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

mp::cpp_int ceil(const Rational& r) { return -floor(Rational(-r)); }

mp::cpp_int round_nearest(const Rational& r) {
  if (r >= 0) return floor(Rational(r + Rational(1, 2)));
  return -floor(Rational(-r + Rational(1, 2)));
}

}  // namespace nullctl
