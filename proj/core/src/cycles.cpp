#include "nullctl/cycles.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace nullctl {

ActivityGraph::ActivityGraph(const NetworkSpec& spec, const FluidSolution& fluid)
    : ActivityGraph(spec.class_count, spec.station_count, fluid.basic_edges, fluid.nonbasic_edges) {}

ActivityGraph::ActivityGraph(std::size_t classes, std::size_t stations, std::vector<Edge> basic,
                             std::vector<Edge> nonbasic)
    : classes_(classes),
      stations_(stations),
      basic_(std::move(basic)),
      nonbasic_(std::move(nonbasic)),
      basic_mask_(classes, stations, 0),
      activity_mask_(classes, stations, 0),
      tree_adj_(classes + stations) {
  std::sort(basic_.begin(), basic_.end());
  std::sort(nonbasic_.begin(), nonbasic_.end());
  for (const auto& e : basic_) {
    basic_mask_(e.cls, e.station) = 1;
    activity_mask_(e.cls, e.station) = 1;
    tree_adj_[e.cls].push_back(station_vertex(e.station));
    tree_adj_[station_vertex(e.station)].push_back(e.cls);
  }
  for (const auto& e : nonbasic_) activity_mask_(e.cls, e.station) = 1;
}

bool ActivityGraph::basic_is_spanning_tree() const {
  if (basic_.size() + 1 != vertex_count()) return false;
  std::vector<char> seen(vertex_count(), 0);
  std::deque<std::size_t> todo{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop_front();
    for (const auto w : tree_adj_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        todo.push_back(w);
      }
    }
  }
  return count == vertex_count();
}

std::vector<Edge> ActivityGraph::tree_order() const {
  std::vector<Edge> order;
  std::vector<char> seen(vertex_count(), 0);
  std::deque<std::size_t> todo{0};
  seen[0] = 1;
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop_front();
    for (const auto w : tree_adj_[v]) {
      if (seen[w]) continue;
      seen[w] = 1;
      todo.push_back(w);
      order.push_back(v < classes_ ? Edge{v, w - classes_} : Edge{w, v - classes_});
    }
  }
  return order;
}

std::vector<std::size_t> ActivityGraph::tree_path(std::size_t from, std::size_t to) const {
  std::vector<std::size_t> parent(vertex_count(), vertex_count());
  std::deque<std::size_t> todo{to};
  parent[to] = to;
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop_front();
    if (v == from) break;
    for (const auto w : tree_adj_[v]) {
      if (parent[w] == vertex_count()) {
        parent[w] = v;
        todo.push_back(w);
      }
    }
  }
  if (parent[from] == vertex_count()) return {};
  std::vector<std::size_t> path{from};
  while (path.back() != to) path.push_back(parent[path.back()]);
  return path;
}

Rational SimpleCycle::e_dot_m() const {
  Rational s = 0;
  for (const auto& v : direction) s += v;
  return s;
}

std::vector<SimpleCycle> enumerate_simple_cycles(const ActivityGraph& graph, const Matrix<Rational>& mu) {
  if (!graph.basic_is_spanning_tree()) {
    throw DomainError("simple cycles require the basic activities to form a spanning tree");
  }
  const std::size_t I = graph.class_count();
  std::vector<SimpleCycle> cycles;
  for (const Edge& nb : graph.nonbasic_edges()) {
    SimpleCycle c;
    c.nonbasic = nb;
    c.sign_table = Matrix<int>(I, graph.station_count(), 0);
    // Path j0 -> ... -> i0 through the tree closes the cycle i0 -> j0 -> ... -> i0.
    const auto path = graph.tree_path(graph.station_vertex(nb.station), nb.cls);
    c.vertices.push_back(nb.cls);
    c.vertices.insert(c.vertices.end(), path.begin(), path.end() - 1);
    c.edges.push_back(nb);
    c.signs.push_back(-1);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const auto u = path[k];
      const auto v = path[k + 1];
      if (u < I) {
        c.edges.push_back({u, v - I});
        c.signs.push_back(-1);
      } else {
        c.edges.push_back({v, u - I});
        c.signs.push_back(+1);
      }
    }
    for (std::size_t k = 0; k < c.edges.size(); ++k) c.sign_table(c.edges[k].cls, c.edges[k].station) = c.signs[k];
    c.direction = control_direction(c, mu);
    cycles.push_back(std::move(c));
  }
  return cycles;
}

std::optional<std::size_t> check_null_controllability(const std::vector<SimpleCycle>& cycles) {
  std::optional<std::size_t> best;
  Rational best_value;
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    const Rational v = cycles[k].e_dot_m();
    if (v >= 0) continue;
    if (!best || v < best_value || (v == best_value && cycles[k].nonbasic < cycles[*best].nonbasic)) {
      best = k;
      best_value = v;
    }
  }
  return best;
}

AssignmentMap::AssignmentMap(const ActivityGraph& graph)
    : classes_(graph.class_count()), stations_(graph.station_count()) {
  if (!graph.basic_is_spanning_tree()) {
    throw DomainError("the assignment map needs a spanning-tree basic set");
  }
  const std::size_t V = graph.vertex_count();
  std::vector<std::vector<std::pair<std::size_t, Edge>>> adj(V);
  for (const auto& e : graph.basic_edges()) {
    adj[e.cls].push_back({classes_ + e.station, e});
    adj[classes_ + e.station].push_back({e.cls, e});
  }
  std::vector<std::size_t> degree(V);
  std::set<std::size_t> leaves;
  for (std::size_t v = 0; v < V; ++v) {
    degree[v] = adj[v].size();
    if (degree[v] == 1) leaves.insert(v);
  }
  std::vector<char> removed(V, 0);
  while (plan_.size() + 1 < V) {
    const auto leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    removed[leaf] = 1;
    for (const auto& [other, edge] : adj[leaf]) {
      if (removed[other]) continue;
      plan_.push_back({leaf, other, edge});
      if (--degree[other] == 1) leaves.insert(other);
      break;
    }
  }
}

Matrix<Rational> AssignmentMap::matrix() const {
  const std::size_t V = classes_ + stations_;
  Matrix<Rational> g(classes_ * stations_, V, Rational(0));
  for (std::size_t col = 0; col < V; ++col) {
    std::vector<Rational> demand(V, Rational(0));
    demand[col] = 1;
    Matrix<Rational> psi(classes_, stations_, Rational(0));
    for (const Step& s : plan_) {
      const Rational flow = demand[s.leaf];
      psi(s.edge.cls, s.edge.station) = flow;
      demand[s.other] -= flow;
    }
    for (std::size_t i = 0; i < classes_; ++i) {
      for (std::size_t j = 0; j < stations_; ++j) g(i * stations_ + j, col) = psi(i, j);
    }
  }
  return g;
}

Matrix<Rational> AssignmentMap::drift_matrix(const Matrix<Rational>& mu) const {
  const Matrix<Rational> g = matrix();
  Matrix<Rational> h(classes_, g.cols(), Rational(0));
  for (std::size_t i = 0; i < classes_; ++i) {
    for (std::size_t col = 0; col < g.cols(); ++col) {
      for (std::size_t j = 0; j < stations_; ++j) h(i, col) -= mu(i, j) * g(i * stations_ + j, col);
    }
  }
  return h;
}

template <class F>
Rational AssignmentMap::max_over_domain_vertices(F&& norm) const {
  const std::size_t V = classes_ + stations_;
  Rational best = 0;
  for (std::size_t p = 0; p < V; ++p) {
    for (std::size_t q = p + 1; q < V; ++q) {
      // (e_p + s e_q)/2 is in the domain for s = -1 within a group, +1 across.
      const bool same_group = (p < classes_) == (q < classes_);
      std::vector<Rational> a(classes_, Rational(0));
      std::vector<Rational> b(stations_, Rational(0));
      auto put = [&](std::size_t v, const Rational& x) {
        if (v < classes_) a[v] = x;
        else b[v - classes_] = x;
      };
      put(p, Rational(1, 2));
      put(q, same_group ? Rational(-1, 2) : Rational(1, 2));
      best = std::max(best, norm(a, b));
    }
  }
  return best;
}

Rational AssignmentMap::lipschitz_constant(const Matrix<Rational>& mu) const {
  const Rational best = max_over_domain_vertices([&](const auto& a, const auto& b) {
    Rational norm = 0;
    for (const auto& v : drift<Rational>(mu, a, b)) norm += abs(v);
    return norm;
  });
  return Rational(2 * static_cast<long>(classes_)) * best;
}

Rational AssignmentMap::operator_norm() const {
  return max_over_domain_vertices([&](const auto& a, const auto& b) {
    Rational norm = 0;
    const Matrix<Rational> psi = solve<Rational>(a, b);
    for (const auto& v : psi.data()) norm += abs(v);
    return norm;
  });
}

}  // namespace nullctl
