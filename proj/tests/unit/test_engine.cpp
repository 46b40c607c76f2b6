#include "examples.hpp"
#include "queueing_oracle.hpp"

#include "nullctl/engine.hpp"
#include "nullctl/errors.hpp"
#include "nullctl/fluid.hpp"
#include "nullctl/policies.hpp"
#include "nullctl/rng.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

using namespace nullctl;

namespace {

class RoguePolicy final : public Policy {
public:
  explicit RoguePolicy(bool preempt) : preempt_(preempt) {}
  Matrix<std::int64_t> initial_assignment(const ScaledInstance& inst, const std::vector<std::int64_t>&) override {
    return Matrix<std::int64_t>(inst.class_count(), inst.station_count(), 0);
  }
  void on_event(const Event&, Dispatch& d) override {
    if (preempt_) {
      d.preempt(0, 0, 1);
    } else {
      d.start(0, 0, d.state().Y[0] + 1);
    }
  }

private:
  bool preempt_;
};

class FixedInit final : public Policy {
public:
  explicit FixedInit(Matrix<std::int64_t> psi) : psi_(std::move(psi)) {}
  Matrix<std::int64_t> initial_assignment(const ScaledInstance&, const std::vector<std::int64_t>&) override {
    return psi_;
  }
  void on_event(const Event&, Dispatch&) override {}

private:
  Matrix<std::int64_t> psi_;
};

/// Time-weighted distribution of the headcount after a warm-up.
std::map<std::int64_t, double> occupancy(const NetworkSpec& spec, const ScaledInstance& inst, double warmup,
                                         double horizon, std::uint64_t seed) {
  WorkConservingPolicy policy(spec);
  Simulator sim(spec, inst, policy, RngStreams(seed, 0, 1, 1));
  std::map<std::int64_t, double> w;
  double last = 0.0;
  std::int64_t x = inst.initial[0];
  sim.run(horizon, [&](const Event& ev, const SystemState& s) {
    const double lo = std::max(last, warmup);
    if (ev.time > lo) w[x] += ev.time - lo;
    last = ev.time;
    x = s.X[0];
  });
  return w;
}

std::map<std::int64_t, double> oracle_occupancy(int servers, double lambda, double mu, double warmup,
                                                double horizon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<std::int64_t, double> w;
  std::int64_t x = servers;
  double t = 0.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (t < horizon) {
    const double total = lambda + mu * static_cast<double>(std::min<std::int64_t>(x, servers));
    const double dt = std::exponential_distribution<double>(total)(rng);
    const double lo = std::max(t, warmup), hi = std::min(t + dt, horizon);
    if (hi > lo) w[x] += hi - lo;
    t += dt;
    x += u(rng) * total < lambda ? 1 : -1;
  }
  return w;
}

double ks_distance(const std::map<std::int64_t, double>& a, const std::map<std::int64_t, double>& b) {
  double ta = 0.0, tb = 0.0;
  for (const auto& [k, v] : a) ta += v;
  for (const auto& [k, v] : b) tb += v;
  std::set<std::int64_t> keys;
  for (const auto& [k, v] : a) keys.insert(k);
  for (const auto& [k, v] : b) keys.insert(k);
  double ca = 0.0, cb = 0.0, d = 0.0;
  for (auto k : keys) {
    if (auto it = a.find(k); it != a.end()) ca += it->second / ta;
    if (auto it = b.find(k); it != b.end()) cb += it->second / tb;
    d = std::max(d, std::abs(ca - cb));
  }
  return d;
}

}  // namespace

TEST(Rng, SeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    for (auto kind : {StreamKind::Interarrival, StreamKind::Service, StreamKind::Routing, StreamKind::Diffusion}) {
      for (std::uint64_t k = 0; k < 6; ++k) seen.insert(derive_seed(42, rep, kind, k));
    }
  }
  EXPECT_EQ(seen.size(), 20u * 4u * 6u);
  EXPECT_EQ(derive_seed(1, 2, StreamKind::Service, 3), derive_seed(1, 2, StreamKind::Service, 3));
  RngStreams a(5, 1, 2, 2), b(5, 1, 2, 2);
  EXPECT_EQ(a.service(1, 1)(), b.service(1, 1)());
  EXPECT_NE(a.service(0, 1)(), a.service(1, 0)());
}

TEST(Rng, UnitInterarrivalMoments) {
  std::mt19937_64 rng(17);
  for (const auto& law : {InterarrivalLaw::exponential(), InterarrivalLaw::deterministic(),
                          InterarrivalLaw::erlang(3), InterarrivalLaw::uniform(1.0, 3.0)}) {
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
      const double x = sample_unit_interarrival(law, rng);
      ASSERT_GE(x, 0.0);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    EXPECT_NEAR(mean, 1.0, 0.01) << law.describe();
    EXPECT_NEAR(var / (mean * mean), law.scv(), 0.02) << law.describe();
  }
}

TEST(Engine, BalanceIdentitiesEveryEvent) {
  const auto spec = oracle::two_by_three();
  const auto fluid = solve_static_lp(spec);
  const auto inst = scale_instance(spec, fluid, 40);
  WorkConservingPolicy policy(spec);
  Simulator sim(spec, inst, policy, RngStreams(3, 0, 2, 3));
  std::int64_t events = 0;
  sim.run(5.0, [&](const Event&, const SystemState& s) {
    ++events;
    for (std::size_t i = 0; i < 2; ++i) {
      std::int64_t busy = 0, gone = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        busy += s.Psi(i, j);
        gone += s.departures(i, j);
        EXPECT_GE(s.Psi(i, j), 0);
      }
      EXPECT_EQ(s.Y[i] + busy, s.X[i]);
      EXPECT_EQ(s.X[i], inst.initial[i] + s.arrivals[i] - gone);
    }
    for (std::size_t j = 0; j < 3; ++j) {
      std::int64_t busy = 0;
      for (std::size_t i = 0; i < 2; ++i) busy += s.Psi(i, j);
      EXPECT_EQ(s.Z[j] + busy, inst.servers[j]);
    }
  });
  EXPECT_GT(events, 100);
  EXPECT_EQ(sim.state().t, 5.0);
}

TEST(Engine, WorkConservingNeverIdlesWithQueue) {
  const auto spec = oracle::controllable();
  const auto fluid = solve_static_lp(spec);
  const auto inst = scale_instance(spec, fluid, 60);
  WorkConservingPolicy policy(spec);
  Simulator sim(spec, inst, policy, RngStreams(8, 0, 2, 2));
  sim.run(3.0, [&](const Event&, const SystemState& s) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        if (spec.is_activity(i, j)) EXPECT_FALSE(s.Y[i] > 0 && s.Z[j] > 0);
      }
    }
  });
}

TEST(Engine, DeterministicForSeed) {
  const auto spec = oracle::controllable();
  const auto fluid = solve_static_lp(spec);
  const auto inst = scale_instance(spec, fluid, 50);
  WorkConservingPolicy p1(spec), p2(spec), p3(spec);
  const auto a = record_run(spec, inst, p1, 2.0, 9, 4);
  const auto b = record_run(spec, inst, p2, 2.0, 9, 4);
  const auto c = record_run(spec, inst, p3, 2.0, 9, 5);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].event.time, b.records[k].event.time);
    EXPECT_EQ(a.records[k].Psi, b.records[k].Psi);
  }
  EXPECT_NE(a.records[1].event.time, c.records[1].event.time);
}

TEST(Engine, ServiceIntegralsMatchPiecewiseSum) {
  const auto spec = oracle::controllable();
  const auto fluid = solve_static_lp(spec);
  const auto inst = scale_instance(spec, fluid, 30);
  WorkConservingPolicy policy(spec);
  const auto tr = record_run(spec, inst, policy, 4.0, 2, 0);
  Matrix<double> sum(2, 2, 0.0);
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    const double dt = tr.records[k].event.time - tr.records[k - 1].event.time;
    for (std::size_t q = 0; q < 4; ++q) sum.data()[q] += dt * static_cast<double>(tr.records[k - 1].Psi.data()[q]);
  }
  for (std::size_t q = 0; q < 4; ++q) {
    EXPECT_NEAR(sum.data()[q], tr.records.back().service_integrals.data()[q], 1e-9 * (1.0 + sum.data()[q]));
  }
}

TEST(Engine, InfeasibleDispatchIsAViolation) {
  const auto spec = oracle::single_station("0.9", "1");
  const auto inst = scale_instance(spec, std::vector<Rational>{Rational(9, 10)}, 10);
  RoguePolicy over(false), under(true);
  Simulator a(spec, inst, over, RngStreams(1, 0, 1, 1));
  EXPECT_THROW(a.run(1.0), InvariantViolation);
  Simulator b(spec, inst, under, RngStreams(1, 0, 1, 1));
  EXPECT_THROW(b.run(1.0), InvariantViolation);
}

TEST(Engine, BadInitialAssignmentRejected) {
  const auto spec = oracle::single_station("0.9", "1");
  const auto inst = scale_instance(spec, std::vector<Rational>{Rational(9, 10)}, 10);
  FixedInit too_many(Matrix<std::int64_t>(1, 1, 10));
  Simulator a(spec, inst, too_many, RngStreams(1, 0, 1, 1));
  EXPECT_THROW(a.init(), DomainError);
  FixedInit negative(Matrix<std::int64_t>(1, 1, -1));
  Simulator b(spec, inst, negative, RngStreams(1, 0, 1, 1));
  EXPECT_THROW(b.init(), DomainError);
}

TEST(Engine, TraceStrideAndCsv) {
  const auto spec = oracle::controllable();
  const auto fluid = solve_static_lp(spec);
  const auto inst = scale_instance(spec, fluid, 20);
  WorkConservingPolicy p1(spec), p2(spec);
  const auto full = record_run(spec, inst, p1, 2.0, 1, 0, 1);
  const auto thin = record_run(spec, inst, p2, 2.0, 1, 0, 7);
  const std::size_t events = full.records.size() - 2;
  EXPECT_EQ(thin.records.size(), 2 + events / 7);
  std::ostringstream os;
  thin.write_csv(os);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,event,class,station,X1,X2,Y1,Y2,Z1,Z2,Psi11,Psi12,Psi21,Psi22");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), thin.records.size() + 1);
}

TEST(Engine, MmnMeanQueueMatchesErlangC) {
  const auto spec = oracle::single_station("0.9", "1");
  const auto inst = scale_instance(spec, std::vector<Rational>{Rational(9, 10)}, 50);
  WorkConservingPolicy policy(spec);
  Simulator sim(spec, inst, policy, RngStreams(21, 0, 1, 1));
  const double warmup = 200.0, horizon = 40000.0;
  double area = 0.0, last = 0.0;
  std::int64_t y = 0;
  sim.run(horizon, [&](const Event& ev, const SystemState& s) {
    const double lo = std::max(last, warmup);
    if (ev.time > lo) area += static_cast<double>(y) * (ev.time - lo);
    last = ev.time;
    y = s.Y[0];
  });
  const double want = oracle::mmn_mean_queue(50, 45.0, 1.0);
  EXPECT_NEAR(area / (horizon - warmup) / want, 1.0, 0.05);
}

TEST(Engine, MmnOccupancyMatchesBirthDeathOracle) {
  const auto spec = oracle::single_station("0.9", "1");
  const auto inst = scale_instance(spec, std::vector<Rational>{Rational(9, 10)}, 50);
  const auto sim = occupancy(spec, inst, 200.0, 40000.0, 33);
  const auto ref = oracle_occupancy(50, 45.0, 1.0, 200.0, 40000.0, 34);
  EXPECT_LT(ks_distance(sim, ref), 0.02);
}

TEST(Engine, ErlangCOracleKnownValue) {
  EXPECT_NEAR(oracle::erlang_c(2, 1.0), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(oracle::mmn_mean_queue(1, 0.5, 1.0), 0.5, 1e-12);
}
