#pragma once

#include "nullctl/matrix.hpp"
#include "nullctl/rational.hpp"

#include <vector>

namespace nullctl::lp {

enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  std::vector<Rational> x;
  Rational objective;
};

/// Optimizes c.x subject to A x = b, x >= 0 with a two-phase tableau simplex
/// in exact rational arithmetic. Bland's rule guarantees termination.
Result solve(const Matrix<Rational>& A, const std::vector<Rational>& b, const std::vector<Rational>& c,
             Sense sense = Sense::Minimize);

}  // namespace nullctl::lp
