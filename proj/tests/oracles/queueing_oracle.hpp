#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

namespace oracle {

/// Erlang-C waiting probability for N servers and offered load a = lambda/mu < N,
/// through the Erlang-B recursion.
inline double erlang_c(int servers, double offered) {
  double b = 1.0;
  for (int k = 1; k <= servers; ++k) b = offered * b / (k + offered * b);
  const double rho = offered / servers;
  return b / (1.0 - rho + rho * b);
}

/// Stationary mean queue length of M/M/N.
inline double mmn_mean_queue(int servers, double lambda, double mu) {
  const double a = lambda / mu;
  const double rho = a / servers;
  return erlang_c(servers, a) * rho / (1.0 - rho);
}

/// Birth-death M/M/N simulator; time-average queue over [warmup, horizon].
inline double simulate_mmn_mean_queue(int servers, double lambda, double mu, double warmup, double horizon,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::int64_t x = 0;
  double t = 0.0, area = 0.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (t < horizon) {
    const double death = mu * static_cast<double>(std::min<std::int64_t>(x, servers));
    const double total = lambda + death;
    const double dt = std::exponential_distribution<double>(total)(rng);
    const double lo = std::max(t, warmup), hi = std::min(t + dt, horizon);
    if (hi > lo) area += static_cast<double>(std::max<std::int64_t>(0, x - servers)) * (hi - lo);
    t += dt;
    if (u(rng) * total < lambda) {
      ++x;
    } else {
      --x;
    }
  }
  return area / (horizon - warmup);
}

}  // namespace oracle
