#pragma once

#include "nullctl/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace nullctl {

enum class StreamKind : std::uint64_t { Interarrival = 1, Service = 2, Routing = 3, Diffusion = 4 };

/// Seed of one substream, a splitmix64 hash of (master, replication, kind, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication, StreamKind kind, std::uint64_t index);

/// Independent named substreams of one replication.
class RngStreams {
public:
  using Engine = std::mt19937_64;

  RngStreams(std::uint64_t master, std::uint64_t replication, std::size_t classes, std::size_t stations);

  Engine& interarrival(std::size_t i) { return interarrival_.at(i); }
  Engine& service(std::size_t i, std::size_t j) { return service_.at(i * stations_ + j); }
  Engine& routing(std::size_t i) { return routing_.at(i); }

  std::uint64_t master() const { return master_; }
  std::uint64_t replication() const { return replication_; }

private:
  std::uint64_t master_;
  std::uint64_t replication_;
  std::size_t stations_;
  std::vector<Engine> interarrival_;
  std::vector<Engine> service_;
  std::vector<Engine> routing_;
};

/// One draw of the unit-mean interarrival variable.
double sample_unit_interarrival(const InterarrivalLaw& law, std::mt19937_64& rng);

}  // namespace nullctl
