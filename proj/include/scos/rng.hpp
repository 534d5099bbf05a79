#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace scos {

using Rng = std::mt19937_64;

// Counter-based stream derivation: any (master, path...) tuple maps to an
// independent seed, so workers never share generator state.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

// Stream tags, kept stable because seeds are persisted in scenario files.
enum Stream : std::uint64_t {
  kStreamLayout = 1,
  kStreamLatent = 2,
  kStreamStatus = 3,
  kStreamTraining = 4,
  kStreamEpisode = 5,
};

double uniform01(Rng& rng);
double standard_normal(Rng& rng);

}  // namespace scos

namespace scos {
double gamma_variate(double shape, Rng& rng);
double beta_variate(double a, double b, Rng& rng);
}  // namespace scos
