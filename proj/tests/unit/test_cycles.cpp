#include "cycle_oracle.hpp"
#include "examples.hpp"

#include "nullctl/cycles.hpp"
#include "nullctl/errors.hpp"
#include "nullctl/fluid.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace nullctl;

namespace {

struct Built {
  NetworkSpec spec;
  FluidSolution fluid;
  ActivityGraph graph;
  std::vector<SimpleCycle> cycles;
};

Built build(const NetworkSpec& spec) {
  FluidSolution fluid = solve_static_lp(spec);
  ActivityGraph graph(spec, fluid);
  auto cycles = enumerate_simple_cycles(graph, spec.mu);
  return {spec, std::move(fluid), std::move(graph), std::move(cycles)};
}

struct RandomTree {
  std::size_t I, J;
  std::vector<Edge> basic, nonbasic;
  Matrix<Rational> mu;
};

RandomTree random_tree(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 4), rate(1, 9);
  RandomTree t;
  t.I = static_cast<std::size_t>(dim(rng));
  t.J = static_cast<std::size_t>(dim(rng));
  std::vector<std::size_t> classes{0}, stations{0};
  t.basic.push_back({0, 0});
  std::vector<std::size_t> pending;
  for (std::size_t i = 1; i < t.I; ++i) pending.push_back(i);
  for (std::size_t j = 1; j < t.J; ++j) pending.push_back(t.I + j);
  std::shuffle(pending.begin(), pending.end(), rng);
  for (std::size_t v : pending) {
    if (v < t.I) {
      const auto j = stations[std::uniform_int_distribution<std::size_t>(0, stations.size() - 1)(rng)];
      t.basic.push_back({v, j});
      classes.push_back(v);
    } else {
      const auto i = classes[std::uniform_int_distribution<std::size_t>(0, classes.size() - 1)(rng)];
      t.basic.push_back({i, v - t.I});
      stations.push_back(v - t.I);
    }
  }
  std::sort(t.basic.begin(), t.basic.end());
  for (std::size_t i = 0; i < t.I; ++i) {
    for (std::size_t j = 0; j < t.J; ++j) {
      if (!std::binary_search(t.basic.begin(), t.basic.end(), Edge{i, j})) t.nonbasic.push_back({i, j});
    }
  }
  t.mu = Matrix<Rational>(t.I, t.J);
  for (auto& v : t.mu.data()) v = rate(rng);
  return t;
}

std::vector<double> random_domain_point(std::size_t I, std::size_t J, std::mt19937_64& rng, std::vector<double>& b) {
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<double> a(I);
  b.assign(J, 0.0);
  double sa = 0.0, sb = 0.0;
  for (auto& v : a) sa += (v = g(rng));
  for (auto& v : b) sb += (v = g(rng));
  b[0] += sa - sb;
  return a;
}

double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

TEST(Cycles, TwoByThreeGolden) {
  const auto b = build(oracle::two_by_three());
  ASSERT_EQ(b.cycles.size(), 2u);
  EXPECT_EQ(b.cycles[0].nonbasic, (Edge{0, 2}));
  EXPECT_EQ(b.cycles[0].direction, oracle::vec({"9", "-2"}));
  EXPECT_EQ(b.cycles[1].nonbasic, (Edge{1, 0}));
  EXPECT_EQ(b.cycles[1].direction, oracle::vec({"-7", "3"}));
  EXPECT_EQ(b.cycles[1].e_dot_m(), -4);
  EXPECT_EQ(check_null_controllability(b.cycles), std::optional<std::size_t>(1));
}

TEST(Cycles, TwoByTwoGolden) {
  const auto a = build(oracle::not_controllable());
  ASSERT_EQ(a.cycles.size(), 1u);
  EXPECT_EQ(a.cycles[0].direction, oracle::vec({"-2", "3"}));
  EXPECT_FALSE(check_null_controllability(a.cycles).has_value());

  const auto b = build(oracle::controllable());
  EXPECT_EQ(b.cycles[0].direction, oracle::vec({"-3", "2"}));
  EXPECT_EQ(check_null_controllability(b.cycles), std::optional<std::size_t>(0));

  const auto c = build(oracle::reversed());
  EXPECT_EQ(c.cycles[0].nonbasic, (Edge{0, 0}));
  EXPECT_EQ(c.cycles[0].direction, oracle::vec({"4", "-5"}));
  EXPECT_TRUE(check_null_controllability(c.cycles).has_value());
}

TEST(Cycles, SignTableAndOrientation) {
  const auto b = build(oracle::two_by_three());
  const auto& c = b.cycles[1];
  EXPECT_EQ(c.vertices, (std::vector<std::size_t>{1, 2, 0, 3}));
  EXPECT_EQ(c.sign(1, 0), -1);
  EXPECT_EQ(c.sign(0, 0), +1);
  EXPECT_EQ(c.sign(0, 1), -1);
  EXPECT_EQ(c.sign(1, 1), +1);
  EXPECT_EQ(c.sign(1, 2), 0);
}

TEST(Cycles, CancellationIdentity) {
  // Pushing one unit around a cycle keeps every row and column sum fixed.
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = random_tree(rng);
    ActivityGraph g(t.I, t.J, t.basic, t.nonbasic);
    for (const auto& c : enumerate_simple_cycles(g, t.mu)) {
      for (std::size_t i = 0; i < t.I; ++i) {
        int row = 0;
        for (std::size_t j = 0; j < t.J; ++j) row += c.sign(i, j);
        EXPECT_EQ(row, 0);
      }
      for (std::size_t j = 0; j < t.J; ++j) {
        int col = 0;
        for (std::size_t i = 0; i < t.I; ++i) col += c.sign(i, j);
        EXPECT_EQ(col, 0);
      }
    }
  }
}

TEST(Cycles, RandomTreesAgreeWithDfsOracle) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 300; ++rep) {
    const auto t = random_tree(rng);
    ActivityGraph g(t.I, t.J, t.basic, t.nonbasic);
    ASSERT_TRUE(g.basic_is_spanning_tree());
    const auto cycles = enumerate_simple_cycles(g, t.mu);
    ASSERT_EQ(cycles.size(), t.nonbasic.size());
    for (std::size_t k = 0; k < cycles.size(); ++k) {
      const auto ref = oracle::dfs_cycles(t.I, t.J, t.basic, t.nonbasic[k], t.mu);
      ASSERT_EQ(ref.size(), 1u);
      EXPECT_EQ(cycles[k].vertices, ref[0].vertices);
      EXPECT_EQ(cycles[k].direction, ref[0].m);
      const auto md = control_direction(cycles[k], t.mu.map<double>([](const Rational& r) { return to_double(r); }));
      for (std::size_t i = 0; i < t.I; ++i) EXPECT_NEAR(md[i], to_double(ref[0].m[i]), 1e-12);
    }
  }
}

TEST(Cycles, VerdictPicksMostNegative) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = random_tree(rng);
    ActivityGraph g(t.I, t.J, t.basic, t.nonbasic);
    const auto cycles = enumerate_simple_cycles(g, t.mu);
    const auto pick = check_null_controllability(cycles);
    Rational best = 0;
    for (const auto& c : cycles) best = std::min(best, c.e_dot_m());
    if (best >= 0) {
      EXPECT_FALSE(pick.has_value());
    } else {
      ASSERT_TRUE(pick.has_value());
      EXPECT_EQ(cycles[*pick].e_dot_m(), best);
    }
  }
}

TEST(Cycles, RequiresSpanningTree) {
  ActivityGraph g(2, 2, {{0, 0}, {1, 1}}, {{0, 1}});
  EXPECT_FALSE(g.basic_is_spanning_tree());
  EXPECT_THROW(enumerate_simple_cycles(g, oracle::rows({{"1", "1"}, {"1", "1"}})), DomainError);
  EXPECT_THROW(AssignmentMap{g}, DomainError);
}

TEST(AssignmentMap, MatchesEigenLeastSquares) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = random_tree(rng);
    ActivityGraph g(t.I, t.J, t.basic, t.nonbasic);
    AssignmentMap G(g);
    std::vector<double> b;
    const auto a = random_domain_point(t.I, t.J, rng, b);
    const auto psi = G.solve(a, b);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.I + t.J),
                                              static_cast<Eigen::Index>(t.basic.size()));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(t.I + t.J));
    for (std::size_t k = 0; k < t.basic.size(); ++k) {
      M(static_cast<Eigen::Index>(t.basic[k].cls), static_cast<Eigen::Index>(k)) = 1.0;
      M(static_cast<Eigen::Index>(t.I + t.basic[k].station), static_cast<Eigen::Index>(k)) = 1.0;
    }
    for (std::size_t i = 0; i < t.I; ++i) rhs(static_cast<Eigen::Index>(i)) = a[i];
    for (std::size_t j = 0; j < t.J; ++j) rhs(static_cast<Eigen::Index>(t.I + j)) = b[j];
    const Eigen::VectorXd x = M.colPivHouseholderQr().solve(rhs);
    for (std::size_t k = 0; k < t.basic.size(); ++k) {
      EXPECT_NEAR(psi(t.basic[k].cls, t.basic[k].station), x(static_cast<Eigen::Index>(k)), 1e-9);
    }
    for (const auto& e : t.nonbasic) EXPECT_EQ(psi(e.cls, e.station), 0.0);
  }
}

TEST(AssignmentMap, LinearAndExactOnIntegers) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::int64_t> u(-50, 50);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = random_tree(rng);
    ActivityGraph g(t.I, t.J, t.basic, t.nonbasic);
    AssignmentMap G(g);
    auto point = [&](std::vector<std::int64_t>& a, std::vector<std::int64_t>& b) {
      a.resize(t.I);
      b.resize(t.J);
      std::int64_t sa = 0, sb = 0;
      for (auto& v : a) sa += (v = u(rng));
      for (auto& v : b) sb += (v = u(rng));
      b[0] += sa - sb;
    };
    std::vector<std::int64_t> a1, b1, a2, b2;
    point(a1, b1);
    point(a2, b2);
    const auto g1 = G.solve(a1, b1);
    const auto g2 = G.solve(a2, b2);
    std::vector<std::int64_t> a3(t.I), b3(t.J);
    for (std::size_t i = 0; i < t.I; ++i) a3[i] = 3 * a1[i] - 2 * a2[i];
    for (std::size_t j = 0; j < t.J; ++j) b3[j] = 3 * b1[j] - 2 * b2[j];
    const auto g3 = G.solve(a3, b3);
    for (std::size_t k = 0; k < g3.data().size(); ++k) {
      EXPECT_EQ(g3.data()[k], 3 * g1.data()[k] - 2 * g2.data()[k]);
    }
    std::vector<Rational> ar(a1.begin(), a1.end()), br(b1.begin(), b1.end());
    const auto gr = G.solve(ar, br);
    for (std::size_t k = 0; k < g1.data().size(); ++k) EXPECT_EQ(gr.data()[k], Rational(g1.data()[k]));
    const auto dense = G.matrix();
    for (std::size_t r = 0; r < dense.rows(); ++r) {
      Rational v = 0;
      for (std::size_t i = 0; i < t.I; ++i) v += dense(r, i) * a1[i];
      for (std::size_t j = 0; j < t.J; ++j) v += dense(r, t.I + j) * b1[j];
      EXPECT_EQ(v, Rational(g1.data()[r]));
    }
  }
}

TEST(AssignmentMap, RejectsOffDomain) {
  const auto b = build(oracle::controllable());
  AssignmentMap G(b.graph);
  EXPECT_THROW(G.solve(std::vector<std::int64_t>{1, 2}, std::vector<std::int64_t>{1, 1}), DomainError);
  EXPECT_THROW(G.solve(std::vector<std::int64_t>{1}, std::vector<std::int64_t>{1, 0}), DomainError);
  EXPECT_THROW(G.solve(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 1.5}), DomainError);
  EXPECT_NO_THROW(G.solve(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0 + 1e-12}));
}

TEST(AssignmentMap, FluidFixedPoint) {
  for (const auto& spec : {oracle::two_by_three(), oracle::controllable(), oracle::reversed()}) {
    const auto b = build(spec);
    AssignmentMap G(b.graph);
    EXPECT_EQ(G.solve(b.fluid.x_star, b.spec.nu), b.fluid.psi_star);
  }
}

TEST(AssignmentMap, DriftConstantGolden) {
  const auto c = build(oracle::controllable());
  EXPECT_EQ(AssignmentMap(c.graph).lipschitz_constant(c.spec.mu), 22);
  const auto r = build(oracle::reversed());
  EXPECT_EQ(AssignmentMap(r.graph).lipschitz_constant(r.spec.mu), 36);
}

TEST(AssignmentMap, DriftConstantBoundsRandomSamples) {
  std::mt19937_64 rng(13);
  for (const auto& spec : {oracle::two_by_three(), oracle::controllable(), oracle::reversed()}) {
    const auto b = build(spec);
    AssignmentMap G(b.graph);
    const double ch = to_double(G.lipschitz_constant(spec.mu));
    const double gn = to_double(G.operator_norm());
    const auto mu = spec.mu.map<double>([](const Rational& r) { return to_double(r); });
    const double twoI = 2.0 * static_cast<double>(spec.class_count);
    double seen_h = 0.0, seen_g = 0.0;
    for (int k = 0; k < 20000; ++k) {
      std::vector<double> bb;
      const auto a = random_domain_point(spec.class_count, spec.station_count, rng, bb);
      const double in = l1(a) + l1(bb);
      seen_h = std::max(seen_h, twoI * l1(G.drift<double>(mu, a, bb)) / in);
      seen_g = std::max(seen_g, l1(G.solve(a, bb).data()) / in);
    }
    EXPECT_LE(seen_h, ch * (1 + 1e-12));
    EXPECT_GE(seen_h, 0.5 * ch);
    EXPECT_LE(seen_g, gn * (1 + 1e-12));
    EXPECT_GE(seen_g, 0.5 * gn);
  }
}
