#include "nullctl/lp.hpp"

#include <cassert>
#include <optional>

namespace nullctl::lp {

namespace {

class Tableau {
public:
  Tableau(std::size_t rows, std::size_t cols) : t_(rows + 1, cols + 1, Rational(0)), basis_(rows, 0) {}

  Rational& at(std::size_t r, std::size_t c) { return t_(r, c); }
  Rational& rhs(std::size_t r) { return t_(r, t_.cols() - 1); }
  Rational& cost(std::size_t c) { return t_(t_.rows() - 1, c); }
  std::size_t rows() const { return t_.rows() - 1; }
  std::size_t cols() const { return t_.cols() - 1; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = t_(r, c);
    for (std::size_t k = 0; k < t_.cols(); ++k) t_(r, k) /= p;
    for (std::size_t q = 0; q < t_.rows(); ++q) {
      if (q == r || t_(q, c) == 0) continue;
      const Rational f = t_(q, c);
      for (std::size_t k = 0; k < t_.cols(); ++k) {
        if (t_(r, k) != 0) t_(q, k) -= f * t_(r, k);
      }
    }
    basis_[r] = c;
  }

  /// Runs simplex iterations over columns [0, usable). Returns false if unbounded.
  bool optimize(std::size_t usable) {
    while (true) {
      std::optional<std::size_t> enter;
      for (std::size_t c = 0; c < usable; ++c) {
        if (cost(c) < 0) {
          enter = c;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t r = 0; r < rows(); ++r) {
        const Rational& a = at(r, *enter);
        if (a <= 0) continue;
        const Rational ratio = rhs(r) / a;
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }

  void drop_row(std::size_t r) {
    Matrix<Rational> next(t_.rows() - 1, t_.cols());
    for (std::size_t q = 0, out = 0; q < t_.rows(); ++q) {
      if (q == r) continue;
      for (std::size_t k = 0; k < t_.cols(); ++k) next(out, k) = t_(q, k);
      ++out;
    }
    t_ = std::move(next);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

private:
  Matrix<Rational> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Result solve(const Matrix<Rational>& A, const std::vector<Rational>& b, const std::vector<Rational>& c,
             Sense sense) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  assert(b.size() == m && c.size() == n);

  // Phase 1: artificials in columns [n, n+m).
  Tableau tab(m, n + m);
  for (std::size_t r = 0; r < m; ++r) {
    const bool flip = b[r] < 0;
    for (std::size_t k = 0; k < n; ++k) tab.at(r, k) = flip ? Rational(-A(r, k)) : A(r, k);
    tab.at(r, n + r) = 1;
    tab.rhs(r) = flip ? Rational(-b[r]) : b[r];
    tab.basis()[r] = n + r;
  }
  for (std::size_t k = 0; k <= n + m; ++k) tab.cost(k) = 0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k < n; ++k) tab.cost(k) -= tab.at(r, k);
    tab.cost(n + m) -= tab.rhs(r);
  }
  tab.optimize(n);

  Result result;
  if (tab.cost(n + m) != 0) {
    result.status = Status::Infeasible;
    return result;
  }
  // Drive remaining artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < tab.rows();) {
    if (tab.basis()[r] < n) {
      ++r;
      continue;
    }
    std::optional<std::size_t> col;
    for (std::size_t k = 0; k < n; ++k) {
      if (tab.at(r, k) != 0) {
        col = k;
        break;
      }
    }
    if (col) {
      tab.pivot(r, *col);
      ++r;
    } else {
      tab.drop_row(r);
    }
  }

  // Phase 2 on the original objective.
  const Rational sign = sense == Sense::Minimize ? Rational(1) : Rational(-1);
  for (std::size_t k = 0; k <= n + m; ++k) tab.cost(k) = 0;
  for (std::size_t k = 0; k < n; ++k) tab.cost(k) = sign * c[k];
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    const std::size_t bc = tab.basis()[r];
    const Rational cb = tab.cost(bc);
    if (cb == 0) continue;
    for (std::size_t k = 0; k <= n + m; ++k) {
      if (k >= n && k < n + m) continue;
      tab.cost(k) -= cb * tab.at(r, k);
    }
  }
  if (!tab.optimize(n)) {
    result.status = Status::Unbounded;
    return result;
  }
  result.status = Status::Optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < tab.rows(); ++r) result.x[tab.basis()[r]] = tab.rhs(r);
  result.objective = 0;
  for (std::size_t k = 0; k < n; ++k) result.objective += c[k] * result.x[k];
  return result;
}

}  // namespace nullctl::lp
