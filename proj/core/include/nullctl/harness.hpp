#pragma once

#include "nullctl/cycles.hpp"
#include "nullctl/diffusion.hpp"
#include "nullctl/engine.hpp"
#include "nullctl/fluid.hpp"
#include "nullctl/model.hpp"
#include "nullctl/policies.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nullctl {

// ---- diffusion scaling ----

struct ScaledRecord {
  double time = 0.0;
  std::vector<double> X, Y, Z;   // centred and scaled headcount, queue, idle
  Matrix<double> Psi;            // (Psi - n psi*) / sqrt(n)
};

std::vector<ScaledRecord> diffusion_scale(const Trace& trace, const ScaledInstance& inst, const FluidSolution& fluid);

/// Inverse of diffusion_scale for one record, rounded to integers.
TraceRecord unscale(const ScaledRecord& r, const ScaledInstance& inst, const FluidSolution& fluid);

// ---- representation identity ----

/// Online evaluation of both sides of the headcount representation
/// X^ = X^0 + W^ + int H^n(X^ - Y^, N^ - Z^) + sum_c m_c^n int Psi^_c
/// together with the sign and balance constraints, at every observed event.
class RepresentationChecker {
public:
  RepresentationChecker(const NetworkSpec& spec, const FluidSolution& fluid, const ScaledInstance& inst);

  void observe(double t, const std::vector<std::int64_t>& X, const std::vector<std::int64_t>& Y,
               const std::vector<std::int64_t>& Z, const Matrix<std::int64_t>& Psi,
               const Matrix<double>& service_integrals, const std::vector<std::int64_t>& arrivals,
               const Matrix<std::int64_t>& departures);
  void observe(const SystemState& s);

  Observer observer();

  double max_residual() const { return max_residual_; }
  double worst_time() const { return worst_time_; }
  std::int64_t constraint_violations() const { return violations_; }
  std::uint64_t observations() const { return observations_; }

private:
  const ScaledInstance& inst_;
  std::size_t I_, J_;
  std::vector<double> x_star_;
  Matrix<double> psi_star_;
  Matrix<double> h_matrix_;              // H^n as I x (I+J)
  std::vector<Edge> nonbasic_;
  std::vector<std::vector<double>> m_n_;  // m_c^n per nonbasic edge
  std::vector<double> ell_;
  std::vector<double> n_hat_;
  std::vector<double> x0_hat_;
  bool started_ = false;
  double last_t_ = 0.0;
  std::vector<std::int64_t> last_X_, last_Y_, last_Z_;
  std::vector<std::int64_t> last_nb_;
  std::vector<KahanSum> int_X_, int_Y_, int_Z_, int_nb_;
  double max_residual_ = 0.0;
  double worst_time_ = 0.0;
  std::int64_t violations_ = 0;
  std::uint64_t observations_ = 0;
};

/// Residual over a stride-1 trace. Throws DomainError for down-sampled traces.
double check_representation(const Trace& trace, const NetworkSpec& spec, const FluidSolution& fluid,
                            const ScaledInstance& inst, std::int64_t* violations = nullptr);

// ---- Monte Carlo ----

enum class PolicyKind { Preemptive, Nonpreemptive, WorkConserving };

PolicyKind parse_policy_kind(const std::string& name);
const char* to_string(PolicyKind kind);

struct PolicyChoice {
  PolicyKind kind = PolicyKind::Preemptive;
  PreemptiveConfig preemptive;
  NonpreemptiveOverrides nonpreemptive;
};

struct Scenario {
  NetworkSpec spec;
  PolicyChoice policy;
  std::vector<std::int64_t> ns;
  double epsilon = 0.5;
  double horizon = 5.0;
  std::size_t replications = 200;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
  bool check_representation = false;
};

/// Throws DomainError describing the first violated scenario invariant.
void validate_scenario(const Scenario& s);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Wilson score interval at 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials);

struct ReplicationOutcome {
  bool null_window = false;     // Y = 0 throughout [epsilon, T]
  bool null_from_zero = false;  // Y = 0 throughout [0, T]
  std::int64_t max_queue = 0;
  double max_scaled_norm = 0.0;
  PolicyCounters counters;
  std::uint64_t events = 0;
  double residual = 0.0;
  std::int64_t constraint_violations = 0;
};

struct LevelStats {
  std::int64_t n = 0;
  std::size_t replications = 0;
  std::size_t successes = 0;
  double p_hat = 0.0;
  Interval ci;
  bool zero_epsilon_reported = false;   // e.x < -1
  std::size_t successes_from_zero = 0;
  double p_hat_from_zero = 0.0;
  std::int64_t max_queue = 0;
  double max_scaled_norm = 0.0;
  std::int64_t fallback_events = 0;
  std::int64_t full_station_events = 0;
  std::size_t replications_with_full_station = 0;
  double mean_events = 0.0;
  double max_residual = 0.0;
  std::int64_t constraint_violations = 0;

  friend bool operator==(const LevelStats&, const LevelStats&) = default;
};

struct SummaryStats {
  std::vector<LevelStats> levels;
  double max_residual = 0.0;

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

/// Builds per-replication policy objects from plans shared across threads.
class PolicyFactory {
public:
  PolicyFactory(const NetworkSpec& spec, const FluidSolution& fluid, const PolicyChoice& choice);

  std::unique_ptr<Policy> make(const ScaledInstance& inst) const;
  PolicyKind kind() const { return kind_; }
  const PreemptivePlan* preemptive() const { return preemptive_.get(); }
  const NonpreemptivePlan* nonpreemptive() const { return nonpreemptive_.get(); }

private:
  const NetworkSpec& spec_;
  PolicyKind kind_;
  std::unique_ptr<PreemptivePlan> preemptive_;
  std::unique_ptr<NonpreemptivePlan> nonpreemptive_;
};

/// One replication at scale n; the building block of estimate_null_probability.
ReplicationOutcome run_replication(const Scenario& s, const FluidSolution& fluid, const PolicyFactory& factory,
                                   const ScaledInstance& inst, std::uint64_t replication);

using LevelCallback = std::function<void(std::int64_t n, const std::vector<ReplicationOutcome>&)>;

/// Fraction of replications with empty queues on [epsilon, T], per n.
/// Refuses non-null-controllable specs with NotNullControllableError.
SummaryStats estimate_null_probability(const Scenario& s, const LevelCallback& on_level = {});

// ---- overload ----

struct OverloadScenario {
  NetworkSpec spec;                       // nominal rates
  std::vector<Rational> overloaded_lambda;
  PolicyChoice policy;
  std::int64_t n = 400;
  std::vector<double> times{5.0, 10.0, 20.0};
  std::size_t replications = 100;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
};

struct OverloadPoint {
  double t = 0.0;
  std::vector<double> per_replication;    // e.Y(t)/n, replication order
  double fraction_positive = 0.0;
  double median = 0.0;
  double lower_quantile = 0.0;            // 5%
};

struct OverloadStats {
  std::vector<OverloadPoint> points;
  double envelope_slope = 0.0;            // least-squares line through the 5% quantiles
  double envelope_intercept = 0.0;
  double fraction_positive_slope = 0.0;   // replications whose own fit has positive slope
};

OverloadStats overloaded_sweep(const OverloadScenario& s);

// ---- diffusion batches ----

struct DiffusionBatchStats {
  std::size_t paths = 0;
  double max_total = 0.0;                 // max over paths and grid of e.X + alpha
  std::size_t monotonicity_violations = 0;
  std::size_t complementarity_violations = 0;
  double mean_push = 0.0;
  double mean_beta = 0.0;
};

/// `paths` independent paths; path k uses the seed derived from (seed, k).
DiffusionBatchStats run_diffusion_batch(const DiffusionSpec& spec, double dt, double horizon, std::size_t paths,
                                        std::uint64_t seed, std::size_t threads = 1,
                                        double flat_tolerance = 1e-9);

// ---- persistence ----

void write_summary_csv(std::ostream& out, const SummaryStats& stats);
void write_summary_text(std::ostream& out, const SummaryStats& stats);
void write_manifest(const std::filesystem::path& path, const std::string& config_json, const std::string& command,
                    std::uint64_t seed);

std::string version_string();

}  // namespace nullctl
