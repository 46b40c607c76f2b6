#include "nullctl/rng.hpp"

#include "nullctl/errors.hpp"

namespace nullctl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication, StreamKind kind, std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ replication);
  h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
  return splitmix64(h ^ index);
}

RngStreams::RngStreams(std::uint64_t master, std::uint64_t replication, std::size_t classes, std::size_t stations)
    : master_(master), replication_(replication), stations_(stations) {
  for (std::size_t i = 0; i < classes; ++i) {
    interarrival_.emplace_back(derive_seed(master, replication, StreamKind::Interarrival, i));
    routing_.emplace_back(derive_seed(master, replication, StreamKind::Routing, i));
  }
  for (std::size_t k = 0; k < classes * stations; ++k) {
    service_.emplace_back(derive_seed(master, replication, StreamKind::Service, k));
  }
}

double sample_unit_interarrival(const InterarrivalLaw& law, std::mt19937_64& rng) {
  switch (law.kind) {
    case InterarrivalLaw::Kind::Exponential:
      return std::exponential_distribution<double>(1.0)(rng);
    case InterarrivalLaw::Kind::Deterministic:
      return 1.0;
    case InterarrivalLaw::Kind::Erlang:
      return std::gamma_distribution<double>(law.erlang_k, 1.0 / law.erlang_k)(rng);
    case InterarrivalLaw::Kind::Uniform: {
      const double mean = 0.5 * (law.lower + law.upper);
      return std::uniform_real_distribution<double>(law.lower, law.upper)(rng) / mean;
    }
  }
  throw DomainError("unknown interarrival law");
}

}  // namespace nullctl
