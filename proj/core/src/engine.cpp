#include "nullctl/engine.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace nullctl {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

[[noreturn]] void violation(const SystemState& s, const std::string& what) {
  std::ostringstream msg;
  msg << "invariant violated at t=" << s.t << ": " << what;
  throw InvariantViolation(msg.str());
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Init: return "init";
    case EventKind::Arrival: return "arrival";
    case EventKind::Completion: return "completion";
    case EventKind::Horizon: return "horizon";
  }
  return "?";
}

const SystemState& Dispatch::state() const { return sim_.state_; }
const ScaledInstance& Dispatch::instance() const { return sim_.inst_; }
RngStreams::Engine& Dispatch::routing(std::size_t cls) { return sim_.rng_.routing(cls); }

void Dispatch::start(std::size_t i, std::size_t j, std::int64_t count) {
  SystemState& s = sim_.state_;
  if (count < 0 || s.Y[i] < count || s.Z[j] < count || !sim_.spec_.is_activity(i, j)) {
    violation(s, "infeasible service start for class " + std::to_string(i + 1) + " at station " +
                     std::to_string(j + 1));
  }
  s.Y[i] -= count;
  s.Z[j] -= count;
  s.Psi(i, j) += count;
  s.started(i, j) += count;
}

void Dispatch::preempt(std::size_t i, std::size_t j, std::int64_t count) {
  SystemState& s = sim_.state_;
  if (count < 0 || s.Psi(i, j) < count) {
    violation(s, "infeasible preemption for class " + std::to_string(i + 1) + " at station " +
                     std::to_string(j + 1));
  }
  s.Y[i] += count;
  s.Z[j] += count;
  s.Psi(i, j) -= count;
  s.preempted(i, j) += count;
}

void Dispatch::assign(const Matrix<std::int64_t>& target) {
  const SystemState& s = sim_.state_;
  for (std::size_t i = 0; i < s.class_count(); ++i) {
    for (std::size_t j = 0; j < s.station_count(); ++j) {
      if (target(i, j) < s.Psi(i, j)) preempt(i, j, s.Psi(i, j) - target(i, j));
    }
  }
  for (std::size_t i = 0; i < s.class_count(); ++i) {
    for (std::size_t j = 0; j < s.station_count(); ++j) {
      if (target(i, j) > s.Psi(i, j)) start(i, j, target(i, j) - s.Psi(i, j));
    }
  }
}

Simulator::Simulator(const NetworkSpec& spec, const ScaledInstance& inst, Policy& policy, RngStreams rng)
    : spec_(spec), inst_(inst), policy_(policy), rng_(std::move(rng)) {}

void Simulator::init() {
  const std::size_t I = inst_.class_count();
  const std::size_t J = inst_.station_count();
  x0_ = inst_.initial;
  psi0_ = policy_.initial_assignment(inst_, x0_);
  if (psi0_.rows() != I || psi0_.cols() != J) throw DomainError("initial assignment has wrong shape");

  state_ = SystemState{};
  state_.X = x0_;
  state_.Y = x0_;
  state_.Z = inst_.servers;
  state_.Psi = psi0_;
  state_.service_integrals = Matrix<KahanSum>(I, J);
  state_.arrivals.assign(I, 0);
  state_.departures = Matrix<std::int64_t>(I, J, 0);
  state_.started = Matrix<std::int64_t>(I, J, 0);
  state_.preempted = Matrix<std::int64_t>(I, J, 0);
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      const auto v = psi0_(i, j);
      if (v < 0) throw DomainError("initial assignment has a negative entry");
      if (v != 0 && !spec_.is_activity(i, j)) throw DomainError("initial assignment uses a non-activity");
      state_.Y[i] -= v;
      state_.Z[j] -= v;
    }
  }
  for (std::size_t i = 0; i < I; ++i) {
    if (state_.Y[i] < 0) throw DomainError("initial assignment serves more customers than present");
  }
  for (std::size_t j = 0; j < J; ++j) {
    if (state_.Z[j] < 0) throw DomainError("initial assignment exceeds station capacity");
  }

  next_arrival_.assign(I, kNever);
  for (std::size_t i = 0; i < I; ++i) sample_arrival(i);
  next_completion_ = Matrix<double>(I, J, kNever);
  clock_psi_ = Matrix<std::int64_t>(I, J, 0);
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) resample_completion(i, j);
  }
  events_ = 0;
  check_invariants();
}

void Simulator::sample_arrival(std::size_t i) {
  const double rate = inst_.lambda_n[i];
  if (rate <= 0.0) {
    next_arrival_[i] = kNever;
    return;
  }
  next_arrival_[i] = state_.t + sample_unit_interarrival(spec_.interarrival_law[i], rng_.interarrival(i)) / rate;
}

void Simulator::resample_completion(std::size_t i, std::size_t j) {
  const std::int64_t busy = state_.Psi(i, j);
  clock_psi_(i, j) = busy;
  const double rate = inst_.mu_n(i, j) * static_cast<double>(busy);
  if (rate <= 0.0) {
    next_completion_(i, j) = kNever;
    return;
  }
  next_completion_(i, j) = state_.t + std::exponential_distribution<double>(rate)(rng_.service(i, j));
}

void Simulator::advance_to(double t) {
  const double dt = t - state_.t;
  if (dt > 0.0) {
    for (std::size_t i = 0; i < state_.class_count(); ++i) {
      for (std::size_t j = 0; j < state_.station_count(); ++j) {
        if (state_.Psi(i, j) != 0) state_.service_integrals(i, j).add(static_cast<double>(state_.Psi(i, j)) * dt);
      }
    }
  }
  state_.t = t;
}

Event Simulator::step(double horizon) {
  const std::size_t I = state_.class_count();
  const std::size_t J = state_.station_count();
  Event ev;
  double best = kNever;
  // Completions win exact ties against arrivals; lower indices win within a kind.
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      if (next_completion_(i, j) < best) {
        best = next_completion_(i, j);
        ev = {best, EventKind::Completion, static_cast<int>(i), static_cast<int>(j)};
      }
    }
  }
  for (std::size_t i = 0; i < I; ++i) {
    if (next_arrival_[i] < best) {
      best = next_arrival_[i];
      ev = {best, EventKind::Arrival, static_cast<int>(i), -1};
    }
  }
  if (!(best <= horizon)) {
    advance_to(std::max(horizon, state_.t));
    return {state_.t, EventKind::Horizon, -1, -1};
  }

  advance_to(best);
  if (ev.kind == EventKind::Completion) {
    const auto i = static_cast<std::size_t>(ev.cls);
    const auto j = static_cast<std::size_t>(ev.station);
    if (state_.Psi(i, j) <= 0) violation(state_, "completion fired on an empty activity");
    state_.Psi(i, j) -= 1;
    state_.X[i] -= 1;
    state_.Z[j] += 1;
    state_.departures(i, j) += 1;
  } else {
    const auto i = static_cast<std::size_t>(ev.cls);
    state_.X[i] += 1;
    state_.Y[i] += 1;
    state_.arrivals[i] += 1;
    sample_arrival(i);
  }

  Dispatch dispatch(*this);
  policy_.on_event(ev, dispatch);

  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      const bool fired = ev.kind == EventKind::Completion && ev.cls == static_cast<int>(i) &&
                         ev.station == static_cast<int>(j);
      if (fired || state_.Psi(i, j) != clock_psi_(i, j)) resample_completion(i, j);
    }
  }
  ++events_;
  check_invariants();
  return ev;
}

void Simulator::run(double horizon, const Observer& observer) {
  init();
  if (observer) observer({0.0, EventKind::Init, -1, -1}, state_);
  for (;;) {
    const Event ev = step(horizon);
    if (observer) observer(ev, state_);
    if (ev.kind == EventKind::Horizon) break;
  }
}

void Simulator::check_invariants() const {
  const SystemState& s = state_;
  const std::size_t I = s.class_count();
  const std::size_t J = s.station_count();
  for (std::size_t i = 0; i < I; ++i) {
    std::int64_t busy = 0;
    std::int64_t gone = 0;
    for (std::size_t j = 0; j < J; ++j) {
      const auto v = s.Psi(i, j);
      if (v < 0) violation(s, "negative Psi");
      if (v != 0 && !spec_.is_activity(i, j)) violation(s, "service on a non-activity");
      if (v != psi0_(i, j) + s.started(i, j) - s.preempted(i, j) - s.departures(i, j)) {
        violation(s, "Psi does not match starts minus departures");
      }
      busy += v;
      gone += s.departures(i, j);
    }
    if (s.Y[i] < 0) violation(s, "negative queue");
    if (s.Y[i] + busy != s.X[i]) violation(s, "Y + sum_j Psi != X for class " + std::to_string(i + 1));
    if (s.X[i] != x0_[i] + s.arrivals[i] - gone) violation(s, "headcount not conserved");
  }
  for (std::size_t j = 0; j < J; ++j) {
    std::int64_t busy = 0;
    for (std::size_t i = 0; i < I; ++i) busy += s.Psi(i, j);
    if (s.Z[j] < 0) violation(s, "negative idle count");
    if (s.Z[j] + busy != inst_.servers[j]) violation(s, "Z + sum_i Psi != N for station " + std::to_string(j + 1));
  }
}

Observer Trace::recorder() {
  return [this, seen = std::uint64_t{0}](const Event& ev, const SystemState& s) mutable {
    const bool keep = ev.kind == EventKind::Init || ev.kind == EventKind::Horizon || (++seen % stride) == 0;
    if (!keep) return;
    TraceRecord r{ev, s.X, s.Y, s.Z, s.Psi, Matrix<double>(s.Psi.rows(), s.Psi.cols()), s.arrivals, s.departures};
    for (std::size_t k = 0; k < r.service_integrals.data().size(); ++k) {
      r.service_integrals.data()[k] = s.service_integrals.data()[k].sum;
    }
    records.push_back(std::move(r));
  };
}

void Trace::write_csv(std::ostream& out) const {
  if (records.empty()) return;
  const std::size_t I = records.front().X.size();
  const std::size_t J = records.front().Z.size();
  out << "time,event,class,station";
  for (std::size_t i = 0; i < I; ++i) out << ",X" << i + 1;
  for (std::size_t i = 0; i < I; ++i) out << ",Y" << i + 1;
  for (std::size_t j = 0; j < J; ++j) out << ",Z" << j + 1;
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) out << ",Psi" << i + 1 << j + 1;
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : records) {
    out << r.event.time << ',' << to_string(r.event.kind) << ',' << r.event.cls + 1 << ',' << r.event.station + 1;
    for (auto v : r.X) out << ',' << v;
    for (auto v : r.Y) out << ',' << v;
    for (auto v : r.Z) out << ',' << v;
    for (auto v : r.Psi.data()) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

Trace record_run(const NetworkSpec& spec, const ScaledInstance& inst, Policy& policy, double horizon,
                 std::uint64_t master_seed, std::uint64_t replication, std::size_t stride) {
  Trace trace;
  trace.master_seed = master_seed;
  trace.replication = replication;
  trace.stride = stride == 0 ? 1 : stride;
  Simulator sim(spec, inst, policy, RngStreams(master_seed, replication, inst.class_count(), inst.station_count()));
  sim.run(horizon, trace.recorder());
  return trace;
}

}  // namespace nullctl
