#include "nullctl/diffusion.hpp"

#include "nullctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nullctl {

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Smallest step d >= guess with e.(x + d m) <= -alpha in floating point.
double push_amount(const std::vector<double>& x, const std::vector<double>& m, double alpha, double guess) {
  auto total_after = [&](double d) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] + d * m[i];
    return s;
  };
  double d = guess;
  for (int k = 0; total_after(d) + alpha > 0.0; ++k) {
    d = k < 64 ? std::nextafter(d, std::numeric_limits<double>::infinity()) : d * (1.0 + 1e-12) + 1e-300;
  }
  return d;
}

}  // namespace

double DiffusionSpec::push_rate() const { return -sum(direction); }

DiffusionSpec make_diffusion_spec(const NetworkSpec& spec, const FluidSolution& fluid, const SimpleCycle& c0,
                                  std::size_t j0, double alpha) {
  const std::size_t I = spec.class_count;
  const std::size_t J = spec.station_count;
  if (j0 >= J) throw DomainError("j0 out of range");
  if (alpha < 0.0) throw DomainError("alpha must be nonnegative");
  DiffusionSpec d;
  d.alpha = alpha;
  d.x0 = spec.x0_hat;
  d.drift.assign(I, 0.0);
  d.variance.assign(I, 0.0);
  for (std::size_t i = 0; i < I; ++i) {
    d.drift[i] = spec.lambda_hat[i];
    for (std::size_t j = 0; j < J; ++j) d.drift[i] -= spec.mu_hat(i, j) * to_double(fluid.psi_star(i, j));
    d.variance[i] = to_double(spec.lambda[i]) * (spec.scv[i] + 1.0);
  }
  const ActivityGraph graph(spec, fluid);
  const AssignmentMap G(graph);
  d.linear_drift = Matrix<double>(I, I, 0.0);
  for (std::size_t k = 0; k < I; ++k) {
    std::vector<Rational> a(I, Rational(0));
    std::vector<Rational> b(J, Rational(0));
    a[k] = 1;
    b[j0] = 1;
    const auto h = G.drift<Rational>(spec.mu, a, b);
    for (std::size_t i = 0; i < I; ++i) d.linear_drift(i, k) = to_double(h[i]);
  }
  d.direction.resize(I);
  for (std::size_t i = 0; i < I; ++i) d.direction[i] = to_double(c0.direction[i]);
  if (!(d.push_rate() > 0.0)) throw NotNullControllableError("reflection direction has e.m >= 0");
  return d;
}

Projection initial_projection(const std::vector<double>& x, const DiffusionSpec& spec) {
  Projection p{x, 0.0};
  const double excess = sum(x) + spec.alpha;
  if (excess <= 0.0) return p;
  p.beta = push_amount(x, spec.direction, spec.alpha, excess / spec.push_rate());
  for (std::size_t i = 0; i < x.size(); ++i) p.y[i] = x[i] + p.beta * spec.direction[i];
  return p;
}

double DiffusionPath::max_total() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& x : X) best = std::max(best, sum(x));
  return best;
}

DiffusionPath simulate_reflected(const DiffusionSpec& spec, double dt, double horizon, std::mt19937_64& rng) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw DomainError("dt and horizon must be positive");
  const std::size_t I = spec.dimension();
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const double c_e = spec.push_rate();
  const double sqrt_dt = std::sqrt(dt);
  std::vector<double> scale(I);
  for (std::size_t i = 0; i < I; ++i) scale[i] = std::sqrt(std::max(0.0, spec.variance[i])) * sqrt_dt;

  DiffusionPath path;
  const Projection start = initial_projection(spec.x0, spec);
  path.beta = start.beta;
  path.time.reserve(steps + 1);
  path.X.reserve(steps + 1);
  path.eta.reserve(steps + 1);
  path.pre_total.reserve(steps + 1);
  path.time.push_back(0.0);
  path.X.push_back(start.y);
  path.eta.push_back(start.beta);
  path.pre_total.push_back(std::numeric_limits<double>::quiet_NaN());

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x = start.y;
  std::vector<double> next(I);
  double eta = start.beta;
  for (std::size_t k = 1; k <= steps; ++k) {
    for (std::size_t i = 0; i < I; ++i) {
      double drift = spec.drift[i];
      for (std::size_t l = 0; l < I; ++l) drift += spec.linear_drift(i, l) * x[l];
      next[i] = x[i] + drift * dt + scale[i] * normal(rng);
    }
    const double pre = sum(next);
    if (pre + spec.alpha > 0.0) {
      const double d = push_amount(next, spec.direction, spec.alpha, (pre + spec.alpha) / c_e);
      for (std::size_t i = 0; i < I; ++i) next[i] += d * spec.direction[i];
      eta += d;
    }
    x = next;
    path.time.push_back(static_cast<double>(k) * dt);
    path.X.push_back(x);
    path.eta.push_back(eta);
    path.pre_total.push_back(pre);
  }
  return path;
}

}  // namespace nullctl
