#include "nullctl/harness.hpp"

#include "nullctl/errors.hpp"
#include "nullctl/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef NULLCTL_VERSION
#define NULLCTL_VERSION "unknown"
#endif

namespace nullctl {

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::int64_t total(const std::vector<std::int64_t>& v) { return std::accumulate(v.begin(), v.end(), std::int64_t{0}); }

std::uint64_t replication_id(std::int64_t n, std::size_t rep) {
  return static_cast<std::uint64_t>(n) * 1000003ULL + static_cast<std::uint64_t>(rep);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Least-squares slope and intercept.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

void require_structure(const NetworkSpec& spec, const FluidSolution& fluid) {
  const auto ht = check_heavy_traffic(fluid);
  if (!ht.holds) throw DomainError("heavy traffic condition fails: " + ht.reason);
  if (!fluid.resource_pooling) throw DomainError("complete resource pooling fails: basic activities are not a spanning tree");
  const ActivityGraph graph(spec, fluid);
  const auto cycles = enumerate_simple_cycles(graph, spec.mu);
  if (!check_null_controllability(cycles)) {
    std::ostringstream msg;
    msg << "not null-controllable:";
    if (cycles.empty()) msg << " no simple cycles";
    for (const auto& c : cycles) {
      msg << " cycle through (" << c.nonbasic.cls + 1 << "," << c.nonbasic.station + 1
          << ") has e.m = " << to_string(c.e_dot_m()) << " >= 0;";
    }
    throw NotNullControllableError(msg.str());
  }
}

}  // namespace

// ---- diffusion scaling ----

std::vector<ScaledRecord> diffusion_scale(const Trace& trace, const ScaledInstance& inst, const FluidSolution& fluid) {
  const double n = static_cast<double>(inst.n);
  const double r = inst.sqrt_n;
  std::vector<ScaledRecord> out;
  out.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    ScaledRecord s;
    s.time = rec.event.time;
    for (std::size_t i = 0; i < rec.X.size(); ++i) {
      s.X.push_back((static_cast<double>(rec.X[i]) - n * to_double(fluid.x_star[i])) / r);
      s.Y.push_back(static_cast<double>(rec.Y[i]) / r);
    }
    for (auto z : rec.Z) s.Z.push_back(static_cast<double>(z) / r);
    s.Psi = Matrix<double>(rec.Psi.rows(), rec.Psi.cols());
    for (std::size_t i = 0; i < rec.Psi.rows(); ++i) {
      for (std::size_t j = 0; j < rec.Psi.cols(); ++j) {
        s.Psi(i, j) = (static_cast<double>(rec.Psi(i, j)) - n * to_double(fluid.psi_star(i, j))) / r;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

TraceRecord unscale(const ScaledRecord& s, const ScaledInstance& inst, const FluidSolution& fluid) {
  const double n = static_cast<double>(inst.n);
  const double r = inst.sqrt_n;
  TraceRecord rec;
  rec.event.time = s.time;
  for (std::size_t i = 0; i < s.X.size(); ++i) {
    rec.X.push_back(std::llround(s.X[i] * r + n * to_double(fluid.x_star[i])));
    rec.Y.push_back(std::llround(s.Y[i] * r));
  }
  for (auto z : s.Z) rec.Z.push_back(std::llround(z * r));
  rec.Psi = Matrix<std::int64_t>(s.Psi.rows(), s.Psi.cols());
  for (std::size_t i = 0; i < s.Psi.rows(); ++i) {
    for (std::size_t j = 0; j < s.Psi.cols(); ++j) {
      rec.Psi(i, j) = std::llround(s.Psi(i, j) * r + n * to_double(fluid.psi_star(i, j)));
    }
  }
  return rec;
}

// ---- representation identity ----

RepresentationChecker::RepresentationChecker(const NetworkSpec& spec, const FluidSolution& fluid,
                                             const ScaledInstance& inst)
    : inst_(inst), I_(spec.class_count), J_(spec.station_count) {
  const double n = static_cast<double>(inst.n);
  const double r = inst.sqrt_n;
  for (const auto& v : fluid.x_star) x_star_.push_back(to_double(v));
  psi_star_ = fluid.psi_star.map<double>([](const Rational& v) { return to_double(v); });

  const ActivityGraph graph(spec, fluid);
  const Matrix<Rational> g = AssignmentMap(graph).matrix();
  h_matrix_ = Matrix<double>(I_, I_ + J_, 0.0);
  for (std::size_t i = 0; i < I_; ++i) {
    for (std::size_t col = 0; col < I_ + J_; ++col) {
      for (std::size_t j = 0; j < J_; ++j) h_matrix_(i, col) -= inst.mu_n(i, j) * to_double(g(i * J_ + j, col));
    }
  }
  for (const auto& c : enumerate_simple_cycles(graph, spec.mu)) {
    nonbasic_.push_back(c.nonbasic);
    m_n_.push_back(control_direction(c, inst.mu_n));
  }
  ell_.assign(I_, 0.0);
  for (std::size_t i = 0; i < I_; ++i) {
    ell_[i] = r * (inst.lambda_n[i] / n - to_double(spec.lambda[i]));
    for (std::size_t j = 0; j < J_; ++j) {
      ell_[i] -= r * (inst.mu_n(i, j) - to_double(spec.mu(i, j))) * psi_star_(i, j);
    }
  }
  n_hat_ = inst.servers_hat;
  int_X_.assign(I_, {});
  int_Y_.assign(I_, {});
  int_Z_.assign(J_, {});
  int_nb_.assign(nonbasic_.size(), {});
}

void RepresentationChecker::observe(double t, const std::vector<std::int64_t>& X, const std::vector<std::int64_t>& Y,
                                    const std::vector<std::int64_t>& Z, const Matrix<std::int64_t>& Psi,
                                    const Matrix<double>& service_integrals,
                                    const std::vector<std::int64_t>& arrivals,
                                    const Matrix<std::int64_t>& departures) {
  const double n = static_cast<double>(inst_.n);
  const double r = inst_.sqrt_n;
  if (!started_) {
    started_ = true;
    x0_hat_.resize(I_);
    for (std::size_t i = 0; i < I_; ++i) x0_hat_[i] = (static_cast<double>(X[i]) - n * x_star_[i]) / r;
  } else {
    const double dt = t - last_t_;
    for (std::size_t i = 0; i < I_; ++i) {
      int_X_[i].add(static_cast<double>(last_X_[i]) * dt);
      int_Y_[i].add(static_cast<double>(last_Y_[i]) * dt);
    }
    for (std::size_t j = 0; j < J_; ++j) int_Z_[j].add(static_cast<double>(last_Z_[j]) * dt);
    for (std::size_t c = 0; c < nonbasic_.size(); ++c) int_nb_[c].add(static_cast<double>(last_nb_[c]) * dt);
  }
  last_t_ = t;
  last_X_ = X;
  last_Y_ = Y;
  last_Z_ = Z;
  last_nb_.resize(nonbasic_.size());
  for (std::size_t c = 0; c < nonbasic_.size(); ++c) last_nb_[c] = Psi(nonbasic_[c].cls, nonbasic_[c].station);
  ++observations_;

  // Sign and balance constraints.
  bool ok = true;
  for (std::size_t i = 0; i < I_; ++i) {
    std::int64_t busy = 0;
    for (std::size_t j = 0; j < J_; ++j) busy += Psi(i, j);
    ok = ok && Y[i] >= 0 && Y[i] + busy == X[i];
  }
  for (std::size_t j = 0; j < J_; ++j) {
    std::int64_t busy = 0;
    for (std::size_t i = 0; i < I_; ++i) busy += Psi(i, j);
    ok = ok && Z[j] >= 0 && Z[j] + busy == inst_.servers[j];
  }
  for (auto v : last_nb_) ok = ok && v >= 0;
  ok = ok && total(X) - total(Y) == total(inst_.servers) - total(Z);
  if (!ok) ++violations_;

  std::vector<double> ab(I_ + J_);
  for (std::size_t i = 0; i < I_; ++i) ab[i] = (int_X_[i].sum - n * x_star_[i] * t - int_Y_[i].sum) / r;
  for (std::size_t j = 0; j < J_; ++j) ab[I_ + j] = n_hat_[j] * t - int_Z_[j].sum / r;
  for (std::size_t i = 0; i < I_; ++i) {
    double w = (static_cast<double>(arrivals[i]) - inst_.lambda_n[i] * t) / r + ell_[i] * t;
    for (std::size_t j = 0; j < J_; ++j) {
      w -= (static_cast<double>(departures(i, j)) - inst_.mu_n(i, j) * service_integrals(i, j)) / r;
    }
    double drift = 0.0;
    for (std::size_t col = 0; col < I_ + J_; ++col) drift += h_matrix_(i, col) * ab[col];
    double control = 0.0;
    for (std::size_t c = 0; c < nonbasic_.size(); ++c) control += m_n_[c][i] * int_nb_[c].sum / r;
    const double lhs = (static_cast<double>(X[i]) - n * x_star_[i]) / r;
    const double rhs = x0_hat_[i] + w + drift + control;
    const double res = std::abs(lhs - rhs);
    if (res > max_residual_ || std::isnan(res)) {
      max_residual_ = std::isnan(res) ? std::numeric_limits<double>::infinity() : res;
      worst_time_ = t;
    }
  }
}

void RepresentationChecker::observe(const SystemState& s) {
  Matrix<double> integrals(s.Psi.rows(), s.Psi.cols());
  for (std::size_t k = 0; k < integrals.data().size(); ++k) integrals.data()[k] = s.service_integrals.data()[k].sum;
  observe(s.t, s.X, s.Y, s.Z, s.Psi, integrals, s.arrivals, s.departures);
}

Observer RepresentationChecker::observer() {
  return [this](const Event&, const SystemState& s) { observe(s); };
}

double check_representation(const Trace& trace, const NetworkSpec& spec, const FluidSolution& fluid,
                            const ScaledInstance& inst, std::int64_t* violations) {
  if (trace.stride != 1) throw DomainError("the representation check needs every event (stride 1)");
  RepresentationChecker checker(spec, fluid, inst);
  for (const auto& r : trace.records) {
    checker.observe(r.event.time, r.X, r.Y, r.Z, r.Psi, r.service_integrals, r.arrivals, r.departures);
  }
  if (violations) *violations = checker.constraint_violations();
  return checker.max_residual();
}

// ---- Monte Carlo ----

PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "preemptive") return PolicyKind::Preemptive;
  if (name == "nonpreemptive") return PolicyKind::Nonpreemptive;
  if (name == "work-conserving") return PolicyKind::WorkConserving;
  throw DomainError("unknown policy '" + name + "'");
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Preemptive: return "preemptive";
    case PolicyKind::Nonpreemptive: return "nonpreemptive";
    case PolicyKind::WorkConserving: return "work-conserving";
  }
  return "?";
}

void validate_scenario(const Scenario& s) {
  if (!(s.epsilon >= 0.0) || !(s.epsilon < s.horizon)) {
    throw DomainError("scenario needs 0 <= epsilon < T");
  }
  if (s.replications < 1) throw DomainError("scenario needs at least one replication");
  if (s.ns.empty()) throw DomainError("scenario needs at least one n");
  for (std::size_t k = 0; k < s.ns.size(); ++k) {
    if (s.ns[k] < 1) throw DomainError("n must be positive");
    if (k > 0 && s.ns[k] <= s.ns[k - 1]) throw DomainError("n values must be strictly increasing");
  }
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::min(p, std::max(0.0, centre - half)), std::max(p, std::min(1.0, centre + half))};
}

PolicyFactory::PolicyFactory(const NetworkSpec& spec, const FluidSolution& fluid, const PolicyChoice& choice)
    : spec_(spec), kind_(choice.kind) {
  switch (kind_) {
    case PolicyKind::Preemptive:
      preemptive_ = std::make_unique<PreemptivePlan>(spec, fluid, choice.preemptive);
      break;
    case PolicyKind::Nonpreemptive:
      nonpreemptive_ = std::make_unique<NonpreemptivePlan>(spec, fluid, choice.nonpreemptive);
      break;
    case PolicyKind::WorkConserving:
      break;
  }
}

std::unique_ptr<Policy> PolicyFactory::make(const ScaledInstance& inst) const {
  switch (kind_) {
    case PolicyKind::Preemptive: return std::make_unique<PreemptivePolicy>(*preemptive_, inst);
    case PolicyKind::Nonpreemptive: return std::make_unique<NonpreemptivePolicy>(*nonpreemptive_, inst);
    case PolicyKind::WorkConserving: return std::make_unique<WorkConservingPolicy>(spec_);
  }
  throw DomainError("unknown policy");
}

ReplicationOutcome run_replication(const Scenario& s, const FluidSolution& fluid, const PolicyFactory& factory,
                                   const ScaledInstance& inst, std::uint64_t replication) {
  auto policy = factory.make(inst);
  Simulator sim(s.spec, inst, *policy, RngStreams(s.master_seed, replication, inst.class_count(), inst.station_count()));
  std::optional<RepresentationChecker> checker;
  if (s.check_representation) checker.emplace(s.spec, fluid, inst);

  ReplicationOutcome out;
  out.null_window = true;
  out.null_from_zero = true;
  bool entered = false;
  bool zero_at_epsilon = true;
  const double n = static_cast<double>(inst.n);
  std::vector<double> centre;
  for (const auto& v : fluid.x_star) centre.push_back(n * to_double(v));

  sim.run(s.horizon, [&](const Event& ev, const SystemState& st) {
    const std::int64_t queue = total(st.Y);
    const bool zero = queue == 0;
    out.null_from_zero = out.null_from_zero && zero;
    if (ev.time <= s.epsilon) {
      zero_at_epsilon = zero;
    } else {
      if (!entered) {
        entered = true;
        out.null_window = out.null_window && zero_at_epsilon;
      }
      out.null_window = out.null_window && zero;
    }
    out.max_queue = std::max(out.max_queue, queue);
    double norm = 0.0;
    for (std::size_t i = 0; i < st.X.size(); ++i) norm += std::abs(static_cast<double>(st.X[i]) - centre[i]);
    out.max_scaled_norm = std::max(out.max_scaled_norm, norm / inst.sqrt_n);
    if (checker) checker->observe(st);
  });
  if (!entered) out.null_window = out.null_window && zero_at_epsilon;
  out.counters = policy->counters();
  out.events = sim.event_count();
  if (checker) {
    out.residual = checker->max_residual();
    out.constraint_violations = checker->constraint_violations();
  }
  return out;
}

SummaryStats estimate_null_probability(const Scenario& s, const LevelCallback& on_level) {
  validate_scenario(s);
  require_valid(s.spec);
  const FluidSolution fluid = solve_static_lp(s.spec);
  require_structure(s.spec, fluid);
  const PolicyFactory factory(s.spec, fluid, s.policy);
  const double e_x = std::accumulate(s.spec.x0_hat.begin(), s.spec.x0_hat.end(), 0.0);

  SummaryStats stats;
  for (const auto n : s.ns) {
    const ScaledInstance inst = scale_instance(s.spec, fluid, n);
    std::vector<ReplicationOutcome> outcomes(s.replications);
    parallel_for(s.replications, s.threads, [&](std::size_t k) {
      outcomes[k] = run_replication(s, fluid, factory, inst, replication_id(n, k));
    });
    if (on_level) on_level(n, outcomes);
    LevelStats level;
    level.n = n;
    level.replications = s.replications;
    level.zero_epsilon_reported = e_x < -1.0;
    double events = 0.0;
    for (const auto& o : outcomes) {
      level.successes += o.null_window ? 1 : 0;
      level.successes_from_zero += o.null_from_zero ? 1 : 0;
      level.max_queue = std::max(level.max_queue, o.max_queue);
      level.max_scaled_norm = std::max(level.max_scaled_norm, o.max_scaled_norm);
      level.fallback_events += o.counters.fallback;
      level.full_station_events += o.counters.full_station;
      level.replications_with_full_station += o.counters.full_station > 0 ? 1 : 0;
      events += static_cast<double>(o.events);
      level.max_residual = std::max(level.max_residual, o.residual);
      level.constraint_violations += o.constraint_violations;
    }
    const double reps = static_cast<double>(s.replications);
    level.p_hat = static_cast<double>(level.successes) / reps;
    level.p_hat_from_zero = static_cast<double>(level.successes_from_zero) / reps;
    level.ci = wilson_interval(level.successes, s.replications);
    level.mean_events = events / reps;
    stats.max_residual = std::max(stats.max_residual, level.max_residual);
    stats.levels.push_back(level);
  }
  return stats;
}

// ---- overload ----

OverloadStats overloaded_sweep(const OverloadScenario& s) {
  require_valid(s.spec);
  const std::size_t I = s.spec.class_count;
  if (s.overloaded_lambda.size() != I) throw DomainError("overloaded rates have the wrong dimension");
  bool strict = false;
  for (std::size_t i = 0; i < I; ++i) {
    if (s.overloaded_lambda[i] < s.spec.lambda[i]) throw DomainError("overloaded rates must dominate the nominal rates");
    strict = strict || s.overloaded_lambda[i] > s.spec.lambda[i];
  }
  if (!strict) throw DomainError("overloaded rates must exceed the nominal rates for some class");
  if (s.times.empty() || s.replications < 1 || s.n < 1) throw DomainError("overload scenario is empty");
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    if (!(s.times[k] > 0.0) || (k > 0 && s.times[k] <= s.times[k - 1])) {
      throw DomainError("sample times must be positive and increasing");
    }
  }

  const FluidSolution fluid = solve_static_lp(s.spec);
  const PolicyFactory factory(s.spec, fluid, s.policy);
  const NetworkSpec loaded = with_arrival_rates(s.spec, s.overloaded_lambda);
  const ScaledInstance inst = scale_instance(loaded, fluid, s.n);
  const double horizon = s.times.back();
  const double n = static_cast<double>(s.n);

  std::vector<std::vector<double>> samples(s.replications);
  parallel_for(s.replications, s.threads, [&](std::size_t k) {
    auto policy = factory.make(inst);
    Simulator sim(loaded, inst, *policy, RngStreams(s.master_seed, replication_id(s.n, k), I, s.spec.station_count));
    std::vector<double> values;
    std::int64_t last_queue = 0;
    sim.run(horizon, [&](const Event& ev, const SystemState& st) {
      while (values.size() < s.times.size() && s.times[values.size()] < ev.time) {
        values.push_back(static_cast<double>(last_queue) / n);
      }
      last_queue = total(st.Y);
      if (ev.kind == EventKind::Horizon) {
        while (values.size() < s.times.size()) values.push_back(static_cast<double>(last_queue) / n);
      }
    });
    samples[k] = std::move(values);
  });

  OverloadStats out;
  std::vector<double> lows;
  for (std::size_t p = 0; p < s.times.size(); ++p) {
    OverloadPoint pt;
    pt.t = s.times[p];
    for (const auto& v : samples) pt.per_replication.push_back(v[p]);
    const auto positive = std::count_if(pt.per_replication.begin(), pt.per_replication.end(),
                                        [](double v) { return v > 0.0; });
    pt.fraction_positive = static_cast<double>(positive) / static_cast<double>(s.replications);
    pt.median = quantile(pt.per_replication, 0.5);
    pt.lower_quantile = quantile(pt.per_replication, 0.05);
    lows.push_back(pt.lower_quantile);
    out.points.push_back(std::move(pt));
  }
  std::tie(out.envelope_slope, out.envelope_intercept) = fit_line(s.times, lows);
  std::size_t rising = 0;
  for (const auto& v : samples) rising += fit_line(s.times, v).first > 0.0 ? 1 : 0;
  out.fraction_positive_slope = static_cast<double>(rising) / static_cast<double>(s.replications);
  return out;
}

// ---- diffusion batches ----

DiffusionBatchStats run_diffusion_batch(const DiffusionSpec& spec, double dt, double horizon, std::size_t paths,
                                        std::uint64_t seed, std::size_t threads, double flat_tolerance) {
  struct One {
    double max_total = 0.0;
    std::size_t monotone = 0;
    std::size_t complementary = 0;
    double push = 0.0;
    double beta = 0.0;
  };
  std::vector<One> results(paths);
  parallel_for(paths, threads, [&](std::size_t k) {
    std::mt19937_64 rng(derive_seed(seed, k, StreamKind::Diffusion, 0));
    const DiffusionPath path = simulate_reflected(spec, dt, horizon, rng);
    One o;
    o.max_total = path.max_total() + spec.alpha;
    for (std::size_t s = 1; s < path.eta.size(); ++s) {
      if (path.eta[s] < path.eta[s - 1]) ++o.monotone;
      if (path.pre_total[s] < -spec.alpha - flat_tolerance && path.eta[s] != path.eta[s - 1]) ++o.complementary;
    }
    o.push = path.total_push() - path.beta;
    o.beta = path.beta;
    results[k] = o;
  });
  DiffusionBatchStats out;
  out.paths = paths;
  out.max_total = -std::numeric_limits<double>::infinity();
  for (const auto& o : results) {
    out.max_total = std::max(out.max_total, o.max_total);
    out.monotonicity_violations += o.monotone;
    out.complementarity_violations += o.complementary;
    out.mean_push += o.push;
    out.mean_beta += o.beta;
  }
  if (paths > 0) {
    out.mean_push /= static_cast<double>(paths);
    out.mean_beta /= static_cast<double>(paths);
  }
  return out;
}

// ---- persistence ----

void write_summary_csv(std::ostream& out, const SummaryStats& stats) {
  out << "n,replications,successes,p_hat,ci_lo,ci_hi,successes_from_zero,p_hat_from_zero,max_queue,"
         "max_scaled_norm,fallback_events,full_station_events,replications_with_full_station,mean_events,"
         "max_residual,constraint_violations\n";
  const auto old = out.precision(10);
  for (const auto& l : stats.levels) {
    out << l.n << ',' << l.replications << ',' << l.successes << ',' << l.p_hat << ',' << l.ci.lo << ',' << l.ci.hi
        << ',' << l.successes_from_zero << ',' << l.p_hat_from_zero << ',' << l.max_queue << ','
        << l.max_scaled_norm << ',' << l.fallback_events << ',' << l.full_station_events << ','
        << l.replications_with_full_station << ',' << l.mean_events << ',' << l.max_residual << ','
        << l.constraint_violations << '\n';
  }
  out.precision(old);
}

void write_summary_text(std::ostream& out, const SummaryStats& stats) {
  out << std::left << std::setw(8) << "n" << std::setw(10) << "p_hat" << std::setw(22) << "95% CI" << std::setw(12)
      << "max queue" << std::setw(11) << "fallbacks" << "full-station\n";
  for (const auto& l : stats.levels) {
    std::ostringstream ci;
    ci << std::fixed << std::setprecision(3) << '[' << l.ci.lo << ", " << l.ci.hi << ']';
    std::ostringstream p;
    p << std::fixed << std::setprecision(3) << l.p_hat;
    out << std::setw(8) << l.n << std::setw(10) << p.str() << std::setw(22) << ci.str() << std::setw(12)
        << l.max_queue << std::setw(11) << l.fallback_events << l.full_station_events << '\n';
    if (l.zero_epsilon_reported) {
      out << "        with epsilon = 0: " << std::fixed << std::setprecision(3) << l.p_hat_from_zero << '\n';
      out.unsetf(std::ios::fixed);
    }
  }
  if (stats.max_residual > 0.0) out << "max representation residual: " << stats.max_residual << '\n';
  out << "finite-n estimates; the limit statement fixes no rate of convergence\n";
}

void write_manifest(const std::filesystem::path& path, const std::string& config_json, const std::string& command,
                    std::uint64_t seed) {
  nlohmann::json m;
  m["version"] = version_string();
  m["command"] = command;
  m["master_seed"] = seed;
  m["config"] = nlohmann::json::parse(config_json);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << m.dump(2) << '\n';
}

std::string version_string() { return NULLCTL_VERSION; }

}  // namespace nullctl
