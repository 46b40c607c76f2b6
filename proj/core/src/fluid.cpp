#include "nullctl/fluid.hpp"

#include "nullctl/errors.hpp"
#include "nullctl/lp.hpp"

#include <numeric>

namespace nullctl {

namespace {

struct LpLayout {
  std::vector<Edge> activities;  // columns [0, A)
  std::size_t rho = 0;           // column A
  std::size_t slack0 = 0;        // columns A+1 .. A+J
  std::size_t cols = 0;
};

LpLayout layout_for(const NetworkSpec& spec) {
  LpLayout l;
  for (std::size_t i = 0; i < spec.class_count; ++i) {
    for (std::size_t j = 0; j < spec.station_count; ++j) {
      if (spec.is_activity(i, j)) l.activities.push_back({i, j});
    }
  }
  l.rho = l.activities.size();
  l.slack0 = l.rho + 1;
  l.cols = l.slack0 + spec.station_count;
  return l;
}

Matrix<Rational> xi_from(const lp::Result& r, const LpLayout& l, std::size_t I, std::size_t J) {
  Matrix<Rational> xi(I, J, Rational(0));
  for (std::size_t k = 0; k < l.activities.size(); ++k) xi(l.activities[k].cls, l.activities[k].station) = r.x[k];
  return xi;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

}  // namespace

FluidSolution solve_static_lp(const NetworkSpec& spec) {
  require_valid(spec);
  const std::size_t I = spec.class_count;
  const std::size_t J = spec.station_count;
  const LpLayout l = layout_for(spec);

  FluidSolution sol;
  sol.mu_bar = Matrix<Rational>(I, J, Rational(0));
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) sol.mu_bar(i, j) = spec.nu[j] * spec.mu(i, j);
  }

  Matrix<Rational> A(I + J, l.cols, Rational(0));
  std::vector<Rational> b(I + J, Rational(0));
  for (std::size_t k = 0; k < l.activities.size(); ++k) {
    const auto [i, j] = l.activities[k];
    A(i, k) = sol.mu_bar(i, j);
    A(I + j, k) = 1;
  }
  for (std::size_t i = 0; i < I; ++i) b[i] = spec.lambda[i];
  for (std::size_t j = 0; j < J; ++j) {
    A(I + j, l.rho) = -1;
    A(I + j, l.slack0 + j) = 1;
  }
  std::vector<Rational> cost(l.cols, Rational(0));
  cost[l.rho] = 1;

  const lp::Result opt = lp::solve(A, b, cost);
  if (opt.status != lp::Status::Optimal) {
    throw InfeasibleError("fluid LP is infeasible: some class has no capacity to serve it");
  }
  sol.rho_star = opt.objective;
  sol.xi_star = xi_from(opt, l, I, J);

  // Range each xi over the optimal face {feasible, rho = rho*}.
  Matrix<Rational> face(I + J + 1, l.cols, Rational(0));
  for (std::size_t r = 0; r < I + J; ++r) {
    for (std::size_t k = 0; k < l.cols; ++k) face(r, k) = A(r, k);
  }
  face(I + J, l.rho) = 1;
  std::vector<Rational> face_b = b;
  face_b.push_back(sol.rho_star);
  sol.unique = true;
  for (std::size_t k = 0; k < l.activities.size() && sol.unique; ++k) {
    std::vector<Rational> probe(l.cols, Rational(0));
    probe[k] = 1;
    for (const auto sense : {lp::Sense::Minimize, lp::Sense::Maximize}) {
      const lp::Result r = lp::solve(face, face_b, probe, sense);
      if (r.status == lp::Status::Optimal && r.x[k] != opt.x[k]) {
        sol.unique = false;
        sol.alternative_optimum = xi_from(r, l, I, J);
        break;
      }
    }
  }

  sol.psi_star = Matrix<Rational>(I, J, Rational(0));
  sol.x_star.assign(I, Rational(0));
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      sol.psi_star(i, j) = sol.xi_star(i, j) * spec.nu[j];
      sol.x_star[i] += sol.psi_star(i, j);
      if (!spec.is_activity(i, j)) continue;
      (sol.xi_star(i, j) > 0 ? sol.basic_edges : sol.nonbasic_edges).push_back({i, j});
    }
  }
  sol.heavy_traffic = check_heavy_traffic(sol).holds;
  sol.resource_pooling = check_resource_pooling(sol);
  return sol;
}

HeavyTrafficReport check_heavy_traffic(const FluidSolution& sol) {
  HeavyTrafficReport rep;
  for (std::size_t j = 0; j < sol.station_count(); ++j) {
    Rational col = 0;
    for (std::size_t i = 0; i < sol.class_count(); ++i) col += sol.xi_star(i, j);
    if (col != 1) {
      rep.reason = "station " + std::to_string(j + 1) + " has column sum " + to_string(col) + " != 1";
      rep.slack_station = j;
      return rep;
    }
  }
  if (!sol.unique) {
    rep.reason = "fluid LP optimum is not unique";
    rep.alternative = sol.alternative_optimum;
    return rep;
  }
  rep.holds = true;
  return rep;
}

bool check_resource_pooling(const FluidSolution& sol) {
  const std::size_t I = sol.class_count();
  const std::size_t V = I + sol.station_count();
  if (sol.basic_edges.size() + 1 != V) return false;
  std::vector<std::size_t> parent(V);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& e : sol.basic_edges) {
    const auto a = find_root(parent, e.cls);
    const auto b = find_root(parent, I + e.station);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

}  // namespace nullctl
