#pragma once

#include "nullctl/errors.hpp"
#include "nullctl/fluid.hpp"
#include "nullctl/matrix.hpp"
#include "nullctl/model.hpp"
#include "nullctl/rational.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

namespace nullctl {

/// Bipartite class/station graph. Vertex ids: classes 0..I-1, stations I..I+J-1.
class ActivityGraph {
public:
  ActivityGraph(const NetworkSpec& spec, const FluidSolution& fluid);
  ActivityGraph(std::size_t classes, std::size_t stations, std::vector<Edge> basic, std::vector<Edge> nonbasic);

  std::size_t class_count() const { return classes_; }
  std::size_t station_count() const { return stations_; }
  std::size_t vertex_count() const { return classes_ + stations_; }
  std::size_t station_vertex(std::size_t j) const { return classes_ + j; }

  const std::vector<Edge>& basic_edges() const { return basic_; }
  const std::vector<Edge>& nonbasic_edges() const { return nonbasic_; }
  bool is_basic(std::size_t i, std::size_t j) const { return basic_mask_(i, j) != 0; }
  bool is_activity(std::size_t i, std::size_t j) const { return activity_mask_(i, j) != 0; }

  /// True when the basic edges form a spanning tree.
  bool basic_is_spanning_tree() const;

  /// Basic edges in breadth-first order from class 0.
  std::vector<Edge> tree_order() const;

  /// Vertices of the unique tree path from `from` to `to` (inclusive).
  std::vector<std::size_t> tree_path(std::size_t from, std::size_t to) const;

private:
  std::size_t classes_ = 0;
  std::size_t stations_ = 0;
  std::vector<Edge> basic_;
  std::vector<Edge> nonbasic_;
  Matrix<char> basic_mask_;
  Matrix<char> activity_mask_;
  std::vector<std::vector<std::size_t>> tree_adj_;
};

/// A cycle of the activity graph with exactly one nonbasic edge, oriented
/// i0 -> j0 -> i1 -> j1 -> ... -> jk -> i0 where (i0, j0) is the nonbasic edge.
struct SimpleCycle {
  Edge nonbasic;
  std::vector<std::size_t> vertices;  // i0, j0(vertex id), i1, ...
  std::vector<Edge> edges;            // traversal order, edges.front() == nonbasic
  std::vector<int> signs;             // s(c,i,j): -1 if traversed class->station, +1 otherwise
  Matrix<int> sign_table;             // s(c,i,j) by (i,j); 0 off the cycle
  std::vector<Rational> direction;    // m_c at the limiting rates

  int sign(std::size_t i, std::size_t j) const { return sign_table(i, j); }
  Rational e_dot_m() const;
};

/// One simple cycle per nonbasic edge, in lexicographic nonbasic-edge order.
/// `mu` fills SimpleCycle::direction. Requires a spanning-tree basic set.
std::vector<SimpleCycle> enumerate_simple_cycles(const ActivityGraph& graph, const Matrix<Rational>& mu);

/// m_{i,c} = sum over cycle edges at class i of s(c,i,j) mu_ij.
template <class T>
std::vector<T> control_direction(const SimpleCycle& cycle, const Matrix<T>& mu) {
  std::vector<T> m(mu.rows(), T(0));
  for (std::size_t k = 0; k < cycle.edges.size(); ++k) {
    const Edge& e = cycle.edges[k];
    m[e.cls] += T(cycle.signs[k]) * mu(e.cls, e.station);
  }
  return m;
}

/// Index of the cycle with the most negative e.m_c (ties: lowest nonbasic edge),
/// or nothing if e.m_c >= 0 for every cycle.
std::optional<std::size_t> check_null_controllability(const std::vector<SimpleCycle>& cycles);

/// The solution map G of the tree system
///   sum_j psi_ij = a_i, sum_i psi_ij = b_j, psi = 0 off basic edges,
/// evaluated by leaf elimination on the basic tree, plus the drift map H.
class AssignmentMap {
public:
  explicit AssignmentMap(const ActivityGraph& graph);

  std::size_t class_count() const { return classes_; }
  std::size_t station_count() const { return stations_; }

  /// G(a, b). Throws DomainError unless sum(a) == sum(b) (exactly for exact
  /// types, to 1e-9 relative for floating point).
  template <class T>
  Matrix<T> solve(std::span<const T> a, std::span<const T> b) const {
    check_domain(a, b);
    std::vector<T> demand(classes_ + stations_);
    for (std::size_t i = 0; i < classes_; ++i) demand[i] = a[i];
    for (std::size_t j = 0; j < stations_; ++j) demand[classes_ + j] = b[j];
    Matrix<T> psi(classes_, stations_, T(0));
    for (const Step& s : plan_) {
      const T flow = demand[s.leaf];
      psi(s.edge.cls, s.edge.station) = flow;
      demand[s.other] -= flow;
    }
    return psi;
  }

  template <class T>
  Matrix<T> solve(const std::vector<T>& a, const std::vector<T>& b) const {
    return solve(std::span<const T>(a), std::span<const T>(b));
  }

  /// H_i(a, b) = -sum_j mu_ij G_ij(a, b).
  template <class T, class M>
  std::vector<T> drift(const Matrix<M>& mu, std::span<const T> a, std::span<const T> b) const {
    const Matrix<T> psi = solve(a, b);
    std::vector<T> h(classes_, T(0));
    for (std::size_t i = 0; i < classes_; ++i) {
      for (std::size_t j = 0; j < stations_; ++j) h[i] -= T(mu(i, j)) * psi(i, j);
    }
    return h;
  }

  template <class T, class M>
  std::vector<T> drift(const Matrix<M>& mu, const std::vector<T>& a, const std::vector<T>& b) const {
    return drift<T>(mu, std::span<const T>(a), std::span<const T>(b));
  }

  /// Dense (I*J) x (I+J) matrix of the linear extension used by solve(); rows
  /// are (i,j) row-major, columns are (a, b). Agrees with G on its domain.
  Matrix<Rational> matrix() const;

  /// Dense I x (I+J) matrix of H for the given rates.
  Matrix<Rational> drift_matrix(const Matrix<Rational>& mu) const;

  /// Smallest C with ||H(a,b)|| <= C / (2I) (||a|| + ||b||) on the domain,
  /// l1 norms throughout: 2I times the l1 operator norm of H restricted to
  /// sum(a) == sum(b), attained at a vertex (e_p +- e_q)/2.
  Rational lipschitz_constant(const Matrix<Rational>& mu) const;

  /// l1 operator norm of G restricted to its domain.
  Rational operator_norm() const;

private:
  struct Step {
    std::size_t leaf;
    std::size_t other;
    Edge edge;
  };

  template <class F>
  Rational max_over_domain_vertices(F&& norm) const;

  template <class T>
  void check_domain(std::span<const T> a, std::span<const T> b) const {
    if (a.size() != classes_ || b.size() != stations_) throw DomainError("G: argument has wrong dimension");
    T sa(0), sb(0);
    for (const auto& v : a) sa += v;
    for (const auto& v : b) sb += v;
    if constexpr (std::is_floating_point_v<T>) {
      T scale(1);
      for (const auto& v : a) scale += std::abs(v);
      for (const auto& v : b) scale += std::abs(v);
      if (std::abs(sa - sb) > T(1e-9) * scale) throw DomainError("G: sum(a) != sum(b)");
    } else {
      if (sa != sb) throw DomainError("G: sum(a) != sum(b)");
    }
  }

  std::size_t classes_ = 0;
  std::size_t stations_ = 0;
  std::vector<Step> plan_;
};

}  // namespace nullctl
