#include "examples.hpp"

#include "nullctl/cycles.hpp"
#include "nullctl/diffusion.hpp"
#include "nullctl/errors.hpp"
#include "nullctl/fluid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace nullctl;

namespace {

DiffusionSpec controllable_spec(std::size_t j0, double alpha = 0.0) {
  static const NetworkSpec spec = oracle::controllable();
  static const FluidSolution fluid = solve_static_lp(spec);
  static const ActivityGraph graph(spec, fluid);
  static const auto cycles = enumerate_simple_cycles(graph, spec.mu);
  return make_diffusion_spec(spec, fluid, cycles[0], j0, alpha);
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

DiffusionSpec reflected_bm(double drift, double variance) {
  DiffusionSpec d;
  d.drift = {drift};
  d.variance = {variance};
  d.linear_drift = Matrix<double>(1, 1, 0.0);
  d.direction = {-1.0};
  d.x0 = {0.0};
  return d;
}

}  // namespace

TEST(Diffusion, SpecCoefficients) {
  const auto d = controllable_spec(0);
  EXPECT_EQ(d.linear_drift(0, 0), -4.0);
  EXPECT_EQ(d.linear_drift(0, 1), 3.0);
  EXPECT_EQ(d.linear_drift(1, 0), 0.0);
  EXPECT_EQ(d.linear_drift(1, 1), -4.0);
  EXPECT_EQ(d.direction, (std::vector<double>{-3.0, 2.0}));
  EXPECT_EQ(d.variance, (std::vector<double>{15.0, 4.0}));
  EXPECT_EQ(d.push_rate(), 1.0);
  EXPECT_EQ(d.x0, (std::vector<double>{-1.0, -1.0}));
  const auto e = controllable_spec(1);
  EXPECT_EQ(e.linear_drift(0, 0), -7.0);
  EXPECT_EQ(e.linear_drift(0, 1), 0.0);
  EXPECT_EQ(e.linear_drift(1, 1), -4.0);
}

TEST(Diffusion, SpecRejectsBadInput) {
  EXPECT_THROW(controllable_spec(2), DomainError);
  EXPECT_THROW(controllable_spec(0, -1.0), DomainError);
  const NetworkSpec bad = oracle::not_controllable();
  const FluidSolution fluid = solve_static_lp(bad);
  const ActivityGraph graph(bad, fluid);
  const auto cycles = enumerate_simple_cycles(graph, bad.mu);
  EXPECT_THROW(make_diffusion_spec(bad, fluid, cycles[0], 0), NotNullControllableError);
}

TEST(Diffusion, InitialProjection) {
  auto d = controllable_spec(0, 0.5);
  const auto inside = initial_projection({-1.0, -1.0}, d);
  EXPECT_EQ(inside.beta, 0.0);
  EXPECT_EQ(inside.y, (std::vector<double>{-1.0, -1.0}));
  const auto out = initial_projection({2.0, 1.3}, d);
  EXPECT_NEAR(out.beta, 3.8, 1e-12);
  EXPECT_LE(total(out.y), -0.5);
  EXPECT_NEAR(total(out.y), -0.5, 1e-12);
  EXPECT_NEAR(out.y[0], 2.0 - 3.0 * out.beta, 1e-12);
}

TEST(Diffusion, PathConstraints) {
  for (double alpha : {0.0, 0.7}) {
    auto d = controllable_spec(0, alpha);
    d.x0 = {3.0, 1.0};
    std::mt19937_64 rng(5);
    const auto p = simulate_reflected(d, 1e-3, 5.0, rng);
    ASSERT_EQ(p.time.size(), 5001u);
    EXPECT_LE(p.max_total() + alpha, 0.0);
    EXPECT_GT(p.beta, 0.0);
    for (std::size_t k = 1; k < p.eta.size(); ++k) {
      EXPECT_GE(p.eta[k], p.eta[k - 1]);
      if (p.pre_total[k] + alpha <= 0.0) EXPECT_EQ(p.eta[k], p.eta[k - 1]);
      if (p.eta[k] > p.eta[k - 1]) EXPECT_NEAR(total(p.X[k]) + alpha, 0.0, 1e-9);
    }
  }
}

TEST(Diffusion, BadStepRejected) {
  auto d = controllable_spec(0);
  std::mt19937_64 rng(1);
  EXPECT_THROW(simulate_reflected(d, 0.0, 1.0, rng), DomainError);
  EXPECT_THROW(simulate_reflected(d, 1e-3, -1.0, rng), DomainError);
}

TEST(Diffusion, ReflectedBrownianMotionStationaryLaw) {
  // Drift theta toward the barrier at 0 with variance s2: -X is exponential with rate 2 theta / s2.
  const auto d = reflected_bm(1.0, 2.0);
  std::mt19937_64 rng(99);
  const auto p = simulate_reflected(d, 1e-3, 4000.0, rng);
  double mean = 0.0, tail = 0.0;
  std::size_t count = 0;
  for (std::size_t k = p.X.size() / 20; k < p.X.size(); ++k) {
    mean += -p.X[k][0];
    tail += -p.X[k][0] > 1.0 ? 1.0 : 0.0;
    ++count;
  }
  EXPECT_NEAR(mean / double(count), 1.0, 0.1);
  EXPECT_NEAR(tail / double(count), std::exp(-1.0), 0.04);
  // Local time grows at the drift rate in stationarity.
  EXPECT_NEAR(p.total_push() / 4000.0, 1.0, 0.05);
}

TEST(Diffusion, Deterministic) {
  const auto d = controllable_spec(0);
  std::mt19937_64 a(7), b(7);
  const auto p = simulate_reflected(d, 1e-2, 2.0, a);
  const auto q = simulate_reflected(d, 1e-2, 2.0, b);
  EXPECT_EQ(p.X, q.X);
  EXPECT_EQ(p.eta, q.eta);
}
