#pragma once

#include "nullctl/model.hpp"

#include <optional>
#include <vector>

namespace oracle {

using nullctl::Matrix;
using nullctl::NetworkSpec;
using nullctl::Rational;

/// Exact solution of A x = b for square A, or nothing when singular.
inline std::optional<std::vector<Rational>> solve_square(Matrix<Rational> A, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && A(p, c) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(A(p, k), A(c, k));
      std::swap(b[p], b[c]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A(r, c) == 0) continue;
      const Rational f = A(r, c) / A(c, c);
      for (std::size_t k = c; k < n; ++k) A(r, k) -= f * A(c, k);
      b[r] -= f * b[c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) b[r] /= A(r, r);
  return b;
}

struct LpVertexResult {
  Rational rho;
  std::vector<Matrix<Rational>> optimal_xi;  // one per optimal vertex, duplicates removed
};

/// Minimizes rho over every basic feasible solution of the capacity LP in
/// equality form (activities, rho, one slack per station).
inline LpVertexResult enumerate_capacity_lp(const NetworkSpec& spec) {
  const std::size_t I = spec.class_count, J = spec.station_count;
  std::vector<std::pair<std::size_t, std::size_t>> act;
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      if (spec.mu(i, j) != 0) act.emplace_back(i, j);
    }
  }
  const std::size_t nvar = act.size() + 1 + J;
  const std::size_t m = I + J;
  Matrix<Rational> A(m, nvar, Rational(0));
  std::vector<Rational> b(m, Rational(0));
  for (std::size_t k = 0; k < act.size(); ++k) {
    const auto [i, j] = act[k];
    A(i, k) = spec.nu[j] * spec.mu(i, j);
    A(I + j, k) = 1;
  }
  for (std::size_t j = 0; j < J; ++j) {
    A(I + j, act.size()) = -1;
    A(I + j, act.size() + 1 + j) = 1;
  }
  for (std::size_t i = 0; i < I; ++i) b[i] = spec.lambda[i];

  LpVertexResult out;
  bool found = false;
  std::vector<std::size_t> pick(m);
  for (std::size_t k = 0; k < m; ++k) pick[k] = k;
  for (;;) {
    Matrix<Rational> B(m, m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t k = 0; k < m; ++k) B(r, k) = A(r, pick[k]);
    }
    if (auto sol = solve_square(B, b)) {
      bool feasible = true;
      for (const auto& v : *sol) feasible = feasible && v >= 0;
      if (feasible) {
        std::vector<Rational> x(nvar, Rational(0));
        for (std::size_t k = 0; k < m; ++k) x[pick[k]] = (*sol)[k];
        Matrix<Rational> xi(I, J, Rational(0));
        for (std::size_t k = 0; k < act.size(); ++k) xi(act[k].first, act[k].second) = x[k];
        const Rational rho = x[act.size()];
        if (!found || rho < out.rho) {
          found = true;
          out.rho = rho;
          out.optimal_xi.clear();
        }
        if (rho == out.rho) {
          bool seen = false;
          for (const auto& v : out.optimal_xi) seen = seen || v == xi;
          if (!seen) out.optimal_xi.push_back(xi);
        }
      }
    }
    std::size_t k = m;
    while (k > 0 && pick[k - 1] == nvar - m + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t r = k; r < m; ++r) pick[r] = pick[r - 1] + 1;
  }
  return out;
}

}  // namespace oracle
