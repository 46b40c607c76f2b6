#pragma once

#include "nullctl/cycles.hpp"
#include "nullctl/fluid.hpp"
#include "nullctl/matrix.hpp"
#include "nullctl/model.hpp"

#include <random>
#include <vector>

namespace nullctl {

/// Constrained diffusion dX = (l + Ht X) dt + Sigma^{1/2} dB + m d(eta) on {e.x <= -alpha}.
struct DiffusionSpec {
  std::vector<double> drift;         // l
  std::vector<double> variance;      // diagonal of Sigma
  Matrix<double> linear_drift;       // Ht, I x I
  std::vector<double> direction;     // m_{c0}
  double alpha = 0.0;
  std::vector<double> x0;

  std::size_t dimension() const { return drift.size(); }
  /// C_e = -e.m
  double push_rate() const;
};

/// Diffusion limit of the preemptive policy for cycle c0 and idle-absorbing station j0.
DiffusionSpec make_diffusion_spec(const NetworkSpec& spec, const FluidSolution& fluid, const SimpleCycle& c0,
                                  std::size_t j0, double alpha = 0.0);

struct Projection {
  std::vector<double> y;
  double beta = 0.0;
};

/// Pushes x along m onto the domain if it lies outside; beta = (e.x + alpha)/C_e.
Projection initial_projection(const std::vector<double>& x, const DiffusionSpec& spec);

struct DiffusionPath {
  std::vector<double> time;
  std::vector<std::vector<double>> X;   // after projection
  std::vector<double> eta;              // cumulative, eta[0] = beta
  std::vector<double> pre_total;        // e.X before projection (step k fills index k; index 0 unused)
  double beta = 0.0;

  double max_total() const;             // max over grid of e.X
  double total_push() const { return eta.empty() ? 0.0 : eta.back(); }
};

/// Euler-Maruyama step followed by projection along m. Requires dt > 0, horizon > 0.
DiffusionPath simulate_reflected(const DiffusionSpec& spec, double dt, double horizon, std::mt19937_64& rng);

}  // namespace nullctl
