#include "nullctl/policies.hpp"

#include "nullctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace nullctl {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::int64_t total(const std::vector<std::int64_t>& v) { return std::accumulate(v.begin(), v.end(), std::int64_t{0}); }

Matrix<std::int64_t> greedy_from_empty(const ScaledInstance& inst, const std::vector<std::int64_t>& x0,
                                       const std::vector<Edge>& order) {
  Matrix<std::int64_t> psi(inst.class_count(), inst.station_count(), 0);
  std::vector<std::int64_t> y = x0;
  std::vector<std::int64_t> z = inst.servers;
  for (const Edge& e : order) {
    const auto k = std::min(y[e.cls], z[e.station]);
    if (k <= 0) continue;
    psi(e.cls, e.station) += k;
    y[e.cls] -= k;
    z[e.station] -= k;
  }
  return psi;
}

}  // namespace

void greedy_fill(Dispatch& dispatch, const std::vector<Edge>& order) {
  for (const Edge& e : order) {
    const auto k = std::min(dispatch.state().Y[e.cls], dispatch.state().Z[e.station]);
    if (k > 0) dispatch.start(e.cls, e.station, k);
  }
}

WorkConservingPolicy::WorkConservingPolicy(const NetworkSpec& spec) {
  for (std::size_t i = 0; i < spec.class_count; ++i) {
    for (std::size_t j = 0; j < spec.station_count; ++j) {
      if (spec.is_activity(i, j)) activities_.push_back({i, j});
    }
  }
}

Matrix<std::int64_t> WorkConservingPolicy::initial_assignment(const ScaledInstance& inst,
                                                              const std::vector<std::int64_t>& x0) {
  return greedy_from_empty(inst, x0, activities_);
}

void WorkConservingPolicy::on_event(const Event&, Dispatch& dispatch) { greedy_fill(dispatch, activities_); }

// ---- preemptive ----

PreemptivePlan::PreemptivePlan(const NetworkSpec& spec, const FluidSolution& fluid, PreemptiveConfig cfg)
    : config(cfg),
      graph(spec, fluid),
      cycles(enumerate_simple_cycles(graph, spec.mu)),
      G(graph),
      x_star(fluid.x_star),
      tree_order(graph.tree_order()) {
  if (config.i0 >= spec.class_count || config.j0 >= spec.station_count) {
    throw DomainError("i0/j0 out of range");
  }
  if (config.kn_exponent <= 0.0 || config.kn_exponent >= 0.5) {
    throw DomainError("the K_n exponent must lie in (0, 1/2)");
  }
  if (config.cycle) {
    if (*config.cycle >= cycles.size()) throw DomainError("cycle index out of range");
    if (cycles[*config.cycle].e_dot_m() >= 0) {
      throw NotNullControllableError("the chosen cycle has e.m >= 0");
    }
    cycle_index = *config.cycle;
  } else {
    const auto chosen = check_null_controllability(cycles);
    if (!chosen) {
      std::ostringstream msg;
      msg << "not null-controllable:";
      for (const auto& c : cycles) {
        msg << " cycle (" << c.nonbasic.cls + 1 << "," << c.nonbasic.station + 1 << ") e.m = " << to_string(c.e_dot_m());
      }
      throw NotNullControllableError(msg.str());
    }
    cycle_index = *chosen;
  }
  e_dot_x_star = 0;
  for (const auto& v : x_star) e_dot_x_star += v;
  Rational min_basic = -1;
  for (const auto& e : graph.basic_edges()) {
    const Rational& v = fluid.psi_star(e.cls, e.station);
    if (min_basic < 0 || v < min_basic) min_basic = v;
  }
  c3 = G.operator_norm() * Rational(1 + 2 * static_cast<long>(spec.class_count)) +
       Rational(static_cast<long>(cycles.size()));
  a0 = min_basic / (2 * c3);
}

std::int64_t PreemptivePlan::cycle_load(std::int64_t n) const {
  const double kn = std::ceil(std::pow(static_cast<double>(n), config.kn_exponent));
  return std::llround(std::sqrt(static_cast<double>(n)) * kn);
}

PreemptivePolicy::PreemptivePolicy(const PreemptivePlan& plan, const ScaledInstance& inst)
    : plan_(plan), inst_(inst), load_(plan.cycle_load(inst.n)), total_servers_(total(inst.servers)) {}

double PreemptivePolicy::scaled_total(const std::vector<std::int64_t>& X) const {
  const double centre = static_cast<double>(inst_.n) * to_double(plan_.e_dot_x_star);
  return (static_cast<double>(total(X)) - centre) / inst_.sqrt_n;
}

double PreemptivePolicy::scaled_norm(const std::vector<std::int64_t>& X) const {
  double s = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    s += std::abs(static_cast<double>(X[i]) - static_cast<double>(inst_.n) * to_double(plan_.x_star[i]));
  }
  return s / inst_.sqrt_n;
}

std::int64_t PreemptivePolicy::cycle_level(const std::vector<std::int64_t>& X) const {
  return scaled_total(X) < -1.0 ? 0 : load_;
}

std::optional<Matrix<std::int64_t>> PreemptivePolicy::target(const std::vector<std::int64_t>& X) const {
  if (plan_.config.strict_guard && scaled_norm(X) > to_double(plan_.a0) * inst_.sqrt_n) return std::nullopt;
  const std::int64_t excess = total(X) - total_servers_;
  std::vector<std::int64_t> a = X;
  std::vector<std::int64_t> b = inst_.servers;
  if (excess > 0) a[plan_.config.i0] -= excess;
  else b[plan_.config.j0] += excess;
  Matrix<std::int64_t> psi = plan_.G.solve<std::int64_t>(a, b);
  const std::int64_t level = cycle_level(X);
  const SimpleCycle& c = plan_.cycle();
  for (std::size_t k = 0; k < c.edges.size(); ++k) psi(c.edges[k].cls, c.edges[k].station) -= c.signs[k] * level;
  for (const auto v : psi.data()) {
    if (v < 0) return std::nullopt;
  }
  return psi;
}

Matrix<std::int64_t> PreemptivePolicy::initial_assignment(const ScaledInstance& inst,
                                                          const std::vector<std::int64_t>& x0) {
  if (auto psi = target(x0)) return *psi;
  ++counters_.fallback;
  return greedy_from_empty(inst, x0, plan_.tree_order);
}

void PreemptivePolicy::on_event(const Event&, Dispatch& dispatch) {
  if (auto psi = target(dispatch.state().X)) {
    dispatch.assign(*psi);
    return;
  }
  ++counters_.fallback;
  greedy_fill(dispatch, plan_.tree_order);
}

// ---- nonpreemptive ----

NonpreemptiveConstants derive_constants(const Rational& c_h, const Rational& c_m, const Rational& m_norm) {
  if (c_m <= 0) throw NotNullControllableError("C_m = -e.m must be positive");
  NonpreemptiveConstants k;
  k.c_h = c_h;
  k.c_m = c_m;
  k.m_norm = m_norm;
  k.kappa = (2 + 16 * c_h) / c_m;
  k.delta = 1.0 / (8.0 * to_double(k.kappa) * to_double(m_norm));
  if (c_h > 0) k.delta = std::min(k.delta, std::log(2.0) / to_double(c_h));
  k.gamma = std::log(8.0) / k.delta;
  return k;
}

namespace {

void require_two_by_two(const NetworkSpec& spec, const FluidSolution& fluid) {
  if (spec.class_count != 2 || spec.station_count != 2) {
    throw UnsupportedError("the nonpreemptive policy is defined for two classes and two stations only");
  }
  if (fluid.nonbasic_edges.size() != 1 || fluid.basic_edges.size() != 3) {
    throw UnsupportedError("the nonpreemptive policy needs three basic activities and one nonbasic activity");
  }
}

}  // namespace

NonpreemptiveConstants derive_constants(const NetworkSpec& spec, const FluidSolution& fluid) {
  require_two_by_two(spec, fluid);
  const ActivityGraph graph(spec, fluid);
  const auto cycles = enumerate_simple_cycles(graph, spec.mu);
  const SimpleCycle& c = cycles.front();
  Rational m_norm = 0;
  for (const auto& v : c.direction) m_norm += abs(v);
  const Rational c_m = -c.e_dot_m();
  if (c_m <= 0) {
    throw NotNullControllableError("not null-controllable: e.m = " + to_string(c.e_dot_m()));
  }
  return derive_constants(AssignmentMap(graph).lipschitz_constant(spec.mu), c_m, m_norm);
}

NonpreemptivePlan::NonpreemptivePlan(const NetworkSpec& spec, const FluidSolution& fluid,
                                     NonpreemptiveOverrides overrides)
    : constants(derive_constants(spec, fluid)) {
  const Edge nb = fluid.nonbasic_edges.front();
  relabel.cls = {1 - nb.cls, nb.cls};
  relabel.station = {nb.station, 1 - nb.station};

  kappa = overrides.kappa.value_or(to_double(constants.kappa));
  if (overrides.delta) {
    delta = *overrides.delta;
  } else if (overrides.kappa) {
    delta = 1.0 / (8.0 * kappa * to_double(constants.m_norm));
    if (constants.c_h > 0) delta = std::min(delta, std::log(2.0) / to_double(constants.c_h));
  } else {
    delta = constants.delta;
  }
  gamma = overrides.gamma.value_or(std::log(8.0) / delta);
  if (!(kappa > 0.0) || !(delta > 0.0) || !(gamma > 0.0)) throw DomainError("kappa, delta and gamma must be positive");

  mu21 = to_double(spec.mu(relabel.cls[1], relabel.station[0]));
  lambda2 = to_double(spec.lambda[relabel.cls[1]]);
  e_dot_x_star = 0;
  for (const auto& v : fluid.x_star) e_dot_x_star += v;
}

double alpha_probability(std::int64_t k, std::int64_t n, double kappa, double gamma, double mu21, double lambda2) {
  const double nd = static_cast<double>(n);
  const double base = kappa * (gamma + mu21) / (lambda2 * std::pow(nd, 0.375));
  if (!(base > 0.0)) return 0.0;
  const double log_p = std::log(base) + gamma * static_cast<double>(k - 1) / (nd * lambda2);
  return log_p >= 0.0 ? 1.0 : std::exp(log_p);
}

Subclass classify_arrival(std::int64_t k, std::int64_t n, const NonpreemptivePlan& plan, double u) {
  return u < alpha_probability(k, n, plan.kappa, plan.gamma, plan.mu21, plan.lambda2) ? Subclass::Alpha
                                                                                      : Subclass::Beta;
}

Route route_arrival(Subclass sub, std::int64_t z1, std::int64_t z2) {
  int target = 1;
  if (sub == Subclass::Alpha || (sub == Subclass::Class1 && z1 > z2)) target = 0;
  const std::int64_t free_target = target == 0 ? z1 : z2;
  if (free_target > 0) return {target, false};
  const std::int64_t free_other = target == 0 ? z2 : z1;
  return {free_other > 0 ? 1 - target : -1, true};
}

InitialArrangement nonpreemptive_init(const std::vector<std::int64_t>& x0, const ScaledInstance& inst,
                                      const NonpreemptivePlan& plan) {
  const auto& rl = plan.relabel;
  const std::int64_t x1 = x0[rl.cls[0]];
  const std::int64_t x2 = x0[rl.cls[1]];
  const std::int64_t n1 = inst.servers[rl.station[0]];
  const std::int64_t n2 = inst.servers[rl.station[1]];
  const double nd = static_cast<double>(inst.n);
  const double e_hat = (static_cast<double>(x1 + x2) - nd * to_double(plan.e_dot_x_star)) / inst.sqrt_n;

  InitialArrangement out;
  if (e_hat >= -1.0) {
    out.held = std::max<std::int64_t>(0, x1 + x2 - n1 - n2 + static_cast<std::int64_t>(std::ceil(inst.sqrt_n)));
    if (out.held > x1) throw DomainError("nonpreemptive initial arrangement: held queue exceeds class-1 headcount");
  }
  const std::int64_t xa1 = x1 - out.held;
  const double p21_real = std::ceil(std::pow(nd, 0.625) * plan.kappa);
  if (!(p21_real < 9.0e18)) throw OverflowError("nonpreemptive initial arrangement: Psi_21(0) overflows");
  const auto p21 = static_cast<std::int64_t>(p21_real);
  const std::int64_t p11 = ceil_div(n1 - n2 + xa1 + x2, 2) - p21;
  const std::int64_t p12 = floor_div(n2 - n1 + xa1 - x2, 2) + p21;
  const std::int64_t p22 = x2 - p21;
  if (p11 < 0 || p12 < 0 || p22 < 0 || p11 + p21 > n1 || p12 + p22 > n2) {
    std::ostringstream msg;
    msg << "nonpreemptive initial arrangement infeasible at n=" << inst.n << " (Psi_21(0)=" << p21 << ", Psi_11(0)="
        << p11 << ", Psi_12(0)=" << p12 << ", Psi_22(0)=" << p22 << "); use a larger n or a smaller kappa";
    throw DomainError(msg.str());
  }
  out.psi = Matrix<std::int64_t>(2, 2, 0);
  out.psi(rl.cls[0], rl.station[0]) = p11;
  out.psi(rl.cls[0], rl.station[1]) = p12;
  out.psi(rl.cls[1], rl.station[0]) = p21;
  out.psi(rl.cls[1], rl.station[1]) = p22;
  return out;
}

NonpreemptivePolicy::NonpreemptivePolicy(const NonpreemptivePlan& plan, const ScaledInstance& inst)
    : plan_(plan), inst_(inst) {}

Matrix<std::int64_t> NonpreemptivePolicy::initial_assignment(const ScaledInstance& inst,
                                                             const std::vector<std::int64_t>& x0) {
  auto init = nonpreemptive_init(x0, inst, plan_);
  held_ = init.held;
  release_level_ = held_ + static_cast<std::int64_t>(std::ceil(inst.sqrt_n));
  release_armed_ = false;
  class2_arrivals_ = 0;
  counters_ = {};
  return init.psi;
}

void NonpreemptivePolicy::on_event(const Event& ev, Dispatch& dispatch) {
  const auto& rl = plan_.relabel;
  const SystemState& s = dispatch.state();
  if (ev.kind == EventKind::Arrival) {
    if (held_ > 0 && release_armed_) {
      const std::int64_t z1 = s.Z[rl.station[0]];
      const std::int64_t z2 = s.Z[rl.station[1]];
      const std::int64_t lo = std::max<std::int64_t>(0, held_ - z2);
      const std::int64_t hi = std::min(z1, held_);
      const std::int64_t g1 = std::clamp(ceil_div(z2 - z1 + held_, 2), lo, hi);
      dispatch.start(rl.cls[0], rl.station[0], g1);
      dispatch.start(rl.cls[0], rl.station[1], held_ - g1);
      held_ = 0;
    }
    const auto c = static_cast<std::size_t>(ev.cls);
    Subclass sub = Subclass::Class1;
    if (c == rl.cls[1]) {
      ++class2_arrivals_;
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(dispatch.routing(c));
      sub = classify_arrival(class2_arrivals_, inst_.n, plan_, u);
      if (sub == Subclass::Alpha) ++counters_.alpha;
      else ++counters_.beta;
    }
    const Route r = route_arrival(sub, s.Z[rl.station[0]], s.Z[rl.station[1]]);
    if (r.full) ++counters_.full_station;
    if (r.station >= 0) dispatch.start(c, rl.station[static_cast<std::size_t>(r.station)]);
  }
  if (held_ > 0 && !release_armed_ && s.Z[0] + s.Z[1] > release_level_) release_armed_ = true;
}

}  // namespace nullctl
