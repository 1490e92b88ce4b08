#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sht {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; per-trial seeds come from (master, index) only, so a
/// trial's stream does not depend on how trials are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Rng make_rng(std::uint64_t master, std::uint64_t index = 0) {
  return Rng(derive_seed(master, index));
}

/// exp(sigma * N(0,1)) per point.
std::vector<double> lognormal_values(std::size_t n, double sigma, Rng& rng);

std::vector<double> uniform_values(std::size_t n, double lo, double hi, Rng& rng);

std::vector<double> normal_values(std::size_t n, Rng& rng);

}  // namespace sht
