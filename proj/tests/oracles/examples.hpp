#pragma once

#include "nullctl/model.hpp"

#include <string>
#include <vector>

namespace oracle {

using nullctl::Matrix;
using nullctl::NetworkSpec;
using nullctl::Rational;

inline Rational q(const std::string& text) { return nullctl::parse_decimal(text); }

inline Matrix<Rational> rows(std::vector<std::vector<std::string>> v) {
  Matrix<Rational> m(v.size(), v.front().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v[i].size(); ++j) m(i, j) = q(v[i][j]);
  }
  return m;
}

inline std::vector<Rational> vec(std::vector<std::string> v) {
  std::vector<Rational> out;
  for (const auto& s : v) out.push_back(q(s));
  return out;
}

inline NetworkSpec two_by_three() {
  return NetworkSpec::make(vec({"8", "4"}), rows({{"3", "10", "1"}, {"1", "4", "2"}}), vec({"1", "1", "1"}));
}

inline NetworkSpec not_controllable() {
  return NetworkSpec::make(vec({"13", "3"}), rows({{"8", "10"}, {"3", "6"}}), vec({"1", "1"}));
}

inline NetworkSpec controllable() {
  NetworkSpec s = NetworkSpec::make(vec({"7.5", "2"}), rows({{"4", "7"}, {"2", "4"}}), vec({"1", "1"}));
  s.x0_hat = {-1.0, -1.0};
  return s;
}

inline NetworkSpec reversed() {
  return NetworkSpec::make(vec({"3.5", "11.5"}), rows({{"3", "7"}, {"6", "11"}}), vec({"1", "1"}));
}

inline NetworkSpec single_station(const std::string& lambda, const std::string& mu) {
  return NetworkSpec::make(vec({lambda}), rows({{mu}}), vec({"1"}));
}

}  // namespace oracle
