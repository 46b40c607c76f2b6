#pragma once

#include "nullctl/matrix.hpp"
#include "nullctl/rational.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nullctl {

struct FluidSolution;

/// Unit-mean interarrival distribution of one customer class.
struct InterarrivalLaw {
  enum class Kind { Exponential, Deterministic, Erlang, Uniform };

  Kind kind = Kind::Exponential;
  int erlang_k = 1;      // shape for Kind::Erlang
  double lower = 0.0;    // Kind::Uniform support before normalization
  double upper = 0.0;

  static InterarrivalLaw exponential() { return {}; }
  static InterarrivalLaw deterministic() { return {Kind::Deterministic}; }
  static InterarrivalLaw erlang(int k) { return {Kind::Erlang, k}; }
  static InterarrivalLaw uniform(double a, double b) { return {Kind::Uniform, 1, a, b}; }

  /// Parses "exponential", "deterministic", "erlang(k)" or "uniform(a,b)".
  static InterarrivalLaw parse(std::string_view text);

  /// Squared coefficient of variation of the normalized (mean 1) variable.
  double scv() const;
  std::string describe() const;

  friend bool operator==(const InterarrivalLaw&, const InterarrivalLaw&) = default;
};

/// First- and second-order parameters of the sequence of many-server systems.
///
/// Fluid-level quantities (lambda, mu, nu) are exact rationals so the static LP
/// and every structural quantity derived from it are computed without rounding.
/// Diffusion-level offsets are plain doubles.
struct NetworkSpec {
  std::size_t class_count = 0;
  std::size_t station_count = 0;
  std::vector<Rational> lambda;       // per class, > 0
  std::vector<double> lambda_hat;     // per class
  Matrix<Rational> mu;                // class x station, 0 off the activity set
  Matrix<double> mu_hat;              // class x station, 0 off the activity set
  std::vector<Rational> nu;           // per station, > 0
  std::vector<double> scv;            // per class, matches interarrival_law
  std::vector<InterarrivalLaw> interarrival_law;
  std::vector<double> x0_hat;         // per class initial diffusion offset

  bool is_activity(std::size_t i, std::size_t j) const { return mu(i, j) != 0; }

  /// A spec with every second-order term zero, exponential arrivals and x0_hat = 0.
  static NetworkSpec make(std::vector<Rational> lambda, Matrix<Rational> mu, std::vector<Rational> nu);
};

/// Lists every violated invariant of the spec; empty means valid.
std::vector<std::string> validate_spec(const NetworkSpec& spec);

/// Throws SpecError carrying the joined report when validate_spec is non-empty.
void require_valid(const NetworkSpec& spec);

/// Copy of the spec with first-order arrival rates replaced.
NetworkSpec with_arrival_rates(const NetworkSpec& spec, std::vector<Rational> lambda);

/// The n-th system of the sequence.
struct ScaledInstance {
  std::int64_t n = 0;
  double sqrt_n = 0.0;
  std::vector<double> lambda_n;          // n lambda_i + sqrt(n) lambda_hat_i
  Matrix<double> mu_n;                   // mu_ij + mu_hat_ij / sqrt(n)
  std::vector<std::int64_t> servers;     // N_j^n = round(n nu_j)
  std::vector<std::int64_t> initial;     // X_i^{0,n}
  std::vector<double> servers_hat;       // sqrt(n) (N_j^n / n - nu_j)

  std::size_t class_count() const { return lambda_n.size(); }
  std::size_t station_count() const { return servers.size(); }
};

/// Rounds the spec to integer server counts and head-counts at scale n.
/// x_star is the fluid head-count vector used to centre the initial state.
ScaledInstance scale_instance(const NetworkSpec& spec, std::span<const Rational> x_star, std::int64_t n);
ScaledInstance scale_instance(const NetworkSpec& spec, const FluidSolution& fluid, std::int64_t n);

}  // namespace nullctl
