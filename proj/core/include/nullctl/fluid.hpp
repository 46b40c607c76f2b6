#pragma once

#include "nullctl/matrix.hpp"
#include "nullctl/model.hpp"
#include "nullctl/rational.hpp"

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace nullctl {

/// An activity (class, station), zero-based.
struct Edge {
  std::size_t cls = 0;
  std::size_t station = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Static fluid model: the optimum of the capacity LP and derived quantities.
struct FluidSolution {
  Matrix<Rational> xi_star;        // fraction of station j's capacity serving class i
  Rational rho_star;
  Matrix<Rational> mu_bar;         // nu_j mu_ij
  Matrix<Rational> psi_star;       // xi*_ij nu_j
  std::vector<Rational> x_star;    // row sums of psi*
  std::vector<Edge> basic_edges;   // xi*_ij > 0, lexicographic
  std::vector<Edge> nonbasic_edges;
  bool unique = false;
  std::optional<Matrix<Rational>> alternative_optimum;
  bool heavy_traffic = false;
  bool resource_pooling = false;

  std::size_t class_count() const { return xi_star.rows(); }
  std::size_t station_count() const { return xi_star.cols(); }
};

/// Solves: minimize rho subject to sum_j mu_bar_ij xi_ij = lambda_i,
/// sum_i xi_ij <= rho, xi >= 0 (xi restricted to the activity set), then
/// ranges every xi_ij over the optimal face to decide uniqueness exactly.
/// Throws InfeasibleError if some class cannot be served.
FluidSolution solve_static_lp(const NetworkSpec& spec);

struct HeavyTrafficReport {
  bool holds = false;
  std::string reason;                          // empty when holds
  std::optional<std::size_t> slack_station;    // a station with column sum < 1
  std::optional<Matrix<Rational>> alternative; // a second optimal vertex
};

/// Unique optimum and every station column sum exactly one.
HeavyTrafficReport check_heavy_traffic(const FluidSolution& sol);

/// Basic activities form a spanning tree of the I + J class/station vertices.
bool check_resource_pooling(const FluidSolution& sol);

}  // namespace nullctl
