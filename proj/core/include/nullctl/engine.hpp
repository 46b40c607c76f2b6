#pragma once

#include "nullctl/errors.hpp"
#include "nullctl/matrix.hpp"
#include "nullctl/model.hpp"
#include "nullctl/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace nullctl {

/// Kahan-compensated running sum.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct SystemState {
  double t = 0.0;
  std::vector<std::int64_t> X;               // headcount per class
  std::vector<std::int64_t> Y;               // queue per class
  std::vector<std::int64_t> Z;               // idle servers per station
  Matrix<std::int64_t> Psi;                  // in service, class x station
  Matrix<KahanSum> service_integrals;        // int_0^t Psi_ij ds
  std::vector<std::int64_t> arrivals;        // A_i(t)
  Matrix<std::int64_t> departures;           // D_ij(t)
  Matrix<std::int64_t> started;              // service starts after time 0 (B_ij)
  Matrix<std::int64_t> preempted;            // removals from service by preemption

  std::size_t class_count() const { return X.size(); }
  std::size_t station_count() const { return Z.size(); }
  double service_integral(std::size_t i, std::size_t j) const { return service_integrals(i, j).sum; }
};

enum class EventKind { Init, Arrival, Completion, Horizon };

const char* to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Init;
  int cls = -1;
  int station = -1;
};

class Simulator;

/// Mutation interface handed to policies. Every change keeps Y and Z in step.
class Dispatch {
public:
  explicit Dispatch(Simulator& sim) : sim_(sim) {}

  const SystemState& state() const;
  const ScaledInstance& instance() const;
  RngStreams::Engine& routing(std::size_t cls);

  /// Moves `count` queued class-i customers into free servers at station j.
  void start(std::size_t i, std::size_t j, std::int64_t count = 1);
  /// Moves `count` class-i customers out of service at station j back to the queue.
  void preempt(std::size_t i, std::size_t j, std::int64_t count = 1);
  /// Reaches the target assignment by preempting first and then starting.
  void assign(const Matrix<std::int64_t>& target);

private:
  Simulator& sim_;
};

/// Diagnostic event counts reported by a policy.
struct PolicyCounters {
  std::int64_t fallback = 0;        // preemptive: assignments outside the closed-form rule
  std::int64_t full_station = 0;    // nonpreemptive: arrivals whose target station was full
  std::int64_t alpha = 0;           // nonpreemptive: class-2 arrivals classified alpha
  std::int64_t beta = 0;
};

/// A scheduling policy. One instance per replication; not shared across threads.
class Policy {
public:
  virtual ~Policy() = default;

  /// Psi(0) for the given initial headcount.
  virtual Matrix<std::int64_t> initial_assignment(const ScaledInstance& inst, const std::vector<std::int64_t>& x0) = 0;

  /// Called after the engine has booked an arrival or completion.
  virtual void on_event(const Event& ev, Dispatch& dispatch) = 0;

  virtual PolicyCounters counters() const { return {}; }
};

using Observer = std::function<void(const Event&, const SystemState&)>;

class Simulator {
public:
  Simulator(const NetworkSpec& spec, const ScaledInstance& inst, Policy& policy, RngStreams rng);

  /// Builds the initial state from the policy and samples the first clocks.
  void init();

  /// Processes the next event at or before `horizon`. Returns a Horizon event
  /// (with the state advanced to `horizon`) when nothing remains before it.
  Event step(double horizon);

  /// init() followed by steps until the horizon; the observer sees every event.
  void run(double horizon, const Observer& observer = {});

  const SystemState& state() const { return state_; }
  const ScaledInstance& instance() const { return inst_; }
  const std::vector<std::int64_t>& initial_headcount() const { return x0_; }
  const Matrix<std::int64_t>& initial_assignment() const { return psi0_; }
  std::uint64_t event_count() const { return events_; }

  /// Throws InvariantViolation unless every balance identity holds exactly.
  void check_invariants() const;

private:
  friend class Dispatch;

  void advance_to(double t);
  void resample_completion(std::size_t i, std::size_t j);
  void sample_arrival(std::size_t i);

  const NetworkSpec& spec_;
  const ScaledInstance& inst_;
  Policy& policy_;
  RngStreams rng_;
  SystemState state_;
  std::vector<std::int64_t> x0_;
  Matrix<std::int64_t> psi0_;
  std::vector<double> next_arrival_;
  Matrix<double> next_completion_;
  Matrix<std::int64_t> clock_psi_;
  std::uint64_t events_ = 0;
};

struct TraceRecord {
  Event event;
  std::vector<std::int64_t> X, Y, Z;
  Matrix<std::int64_t> Psi;
  Matrix<double> service_integrals;
  std::vector<std::int64_t> arrivals;
  Matrix<std::int64_t> departures;
};

/// Recorded path: every `stride`-th event plus the first and last.
struct Trace {
  std::uint64_t master_seed = 0;
  std::uint64_t replication = 0;
  std::size_t stride = 1;
  std::vector<TraceRecord> records;

  Observer recorder();
  void write_csv(std::ostream& out) const;
};

/// Runs one replication and records it.
Trace record_run(const NetworkSpec& spec, const ScaledInstance& inst, Policy& policy, double horizon,
                 std::uint64_t master_seed, std::uint64_t replication, std::size_t stride = 1);

}  // namespace nullctl
