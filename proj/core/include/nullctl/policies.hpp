#pragma once

#include "nullctl/cycles.hpp"
#include "nullctl/engine.hpp"
#include "nullctl/fluid.hpp"
#include "nullctl/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace nullctl {

/// Starts as many queued customers as possible on each listed activity, in order.
void greedy_fill(Dispatch& dispatch, const std::vector<Edge>& order);

/// Non-idling baseline: every arrival and every freed server is matched greedily
/// in lexicographic activity order.
class WorkConservingPolicy final : public Policy {
public:
  explicit WorkConservingPolicy(const NetworkSpec& spec);

  Matrix<std::int64_t> initial_assignment(const ScaledInstance& inst, const std::vector<std::int64_t>& x0) override;
  void on_event(const Event& ev, Dispatch& dispatch) override;

private:
  std::vector<Edge> activities_;
};

// ---- preemptive ----

struct PreemptiveConfig {
  std::optional<std::size_t> cycle;   // index into the cycle list; default: the null-controllability choice
  std::size_t i0 = 0;
  std::size_t j0 = 0;
  double kn_exponent = 0.25;          // K_n = ceil(n^p)
  bool strict_guard = false;          // also fall back when |X^| > a0 sqrt(n)
};

/// Instance-independent data of the preemptive policy.
struct PreemptivePlan {
  PreemptivePlan(const NetworkSpec& spec, const FluidSolution& fluid, PreemptiveConfig config);

  PreemptiveConfig config;
  ActivityGraph graph;
  std::vector<SimpleCycle> cycles;
  std::size_t cycle_index = 0;
  AssignmentMap G;
  Rational e_dot_x_star;
  std::vector<Rational> x_star;
  Rational a0;                        // ball radius of the closed-form rule
  Rational c3;
  std::vector<Edge> tree_order;

  const SimpleCycle& cycle() const { return cycles[cycle_index]; }

  /// n^{1/2} K_n rounded to the nearest integer.
  std::int64_t cycle_load(std::int64_t n) const;
};

class PreemptivePolicy final : public Policy {
public:
  PreemptivePolicy(const PreemptivePlan& plan, const ScaledInstance& inst);

  /// Closed-form assignment for headcount X, or nothing when some entry
  /// would be negative (or the strict guard rejects X).
  std::optional<Matrix<std::int64_t>> target(const std::vector<std::int64_t>& X) const;

  /// Psi_{c0} that target() uses for headcount X.
  std::int64_t cycle_level(const std::vector<std::int64_t>& X) const;

  Matrix<std::int64_t> initial_assignment(const ScaledInstance& inst, const std::vector<std::int64_t>& x0) override;
  void on_event(const Event& ev, Dispatch& dispatch) override;
  PolicyCounters counters() const override { return counters_; }

private:
  double scaled_total(const std::vector<std::int64_t>& X) const;
  double scaled_norm(const std::vector<std::int64_t>& X) const;

  const PreemptivePlan& plan_;
  const ScaledInstance& inst_;
  std::int64_t load_;
  std::int64_t total_servers_;
  PolicyCounters counters_;
};

// ---- nonpreemptive (I = J = 2) ----

/// Permutation that moves the single nonbasic activity to (2,1), i.e. (1,0) zero-based.
struct Relabel {
  std::array<std::size_t, 2> cls{0, 1};      // original index of relabeled class k
  std::array<std::size_t, 2> station{0, 1};  // original index of relabeled station k
};

struct NonpreemptiveConstants {
  Rational c_h;        // C'_H
  Rational c_m;        // -e.m
  Rational m_norm;     // l1 norm of m
  Rational kappa;
  double delta = 0.0;
  double gamma = 0.0;
};

/// kappa = (2 + 16 C'_H)/C_m, delta = min(1/(8 kappa |m|), log 2 / C'_H), gamma = log 8 / delta.
NonpreemptiveConstants derive_constants(const Rational& c_h, const Rational& c_m, const Rational& m_norm);
NonpreemptiveConstants derive_constants(const NetworkSpec& spec, const FluidSolution& fluid);

struct NonpreemptiveOverrides {
  std::optional<double> kappa;
  std::optional<double> delta;
  std::optional<double> gamma;
};

struct NonpreemptivePlan {
  NonpreemptivePlan(const NetworkSpec& spec, const FluidSolution& fluid, NonpreemptiveOverrides overrides = {});

  Relabel relabel;
  NonpreemptiveConstants constants;
  double kappa = 0.0;      // effective values after overrides
  double delta = 0.0;
  double gamma = 0.0;
  double mu21 = 0.0;       // limiting rates in relabeled coordinates
  double lambda2 = 0.0;
  Rational e_dot_x_star;
};

/// alpha_n(k) = min(1, kappa (gamma + mu21) / (lambda2 n^{3/8}) exp(gamma (k-1) / (n lambda2))).
double alpha_probability(std::int64_t k, std::int64_t n, double kappa, double gamma, double mu21, double lambda2);

enum class Subclass { Class1, Alpha, Beta };

/// Sub-class of the k-th class-2 arrival given a uniform draw u in [0,1).
Subclass classify_arrival(std::int64_t k, std::int64_t n, const NonpreemptivePlan& plan, double u);

struct Route {
  int station = -1;       // relabeled station 0 or 1; -1 means join the queue
  bool full = false;      // the rule's target station had no free server
};

/// Rule 1 (class 1 to the station with strictly more free servers, else station 2),
/// rule 2 (alpha to station 1), rule 3 (beta to station 2), then the full-station fallback.
Route route_arrival(Subclass sub, std::int64_t z1, std::int64_t z2);

struct InitialArrangement {
  Matrix<std::int64_t> psi;  // original labels
  std::int64_t held = 0;     // r_n class-1 customers kept in queue
};

/// Initial arrangement for headcount x0 (original labels).
InitialArrangement nonpreemptive_init(const std::vector<std::int64_t>& x0, const ScaledInstance& inst,
                                      const NonpreemptivePlan& plan);

class NonpreemptivePolicy final : public Policy {
public:
  NonpreemptivePolicy(const NonpreemptivePlan& plan, const ScaledInstance& inst);

  Matrix<std::int64_t> initial_assignment(const ScaledInstance& inst, const std::vector<std::int64_t>& x0) override;
  void on_event(const Event& ev, Dispatch& dispatch) override;
  PolicyCounters counters() const override { return counters_; }

  std::int64_t held() const { return held_; }
  std::int64_t class2_arrivals() const { return class2_arrivals_; }

private:
  const NonpreemptivePlan& plan_;
  const ScaledInstance& inst_;
  std::int64_t held_ = 0;
  std::int64_t release_level_ = 0;
  bool release_armed_ = false;
  std::int64_t class2_arrivals_ = 0;
  PolicyCounters counters_;
};

}  // namespace nullctl
