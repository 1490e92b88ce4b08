#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sht/dyadic.hpp"
#include "sht/error.hpp"
#include "sht/random.hpp"
#include "sht/space.hpp"

namespace fixtures {

/// Code of the sht::Error raised by f; fails the test when none is raised.
inline sht::Errc error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const sht::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return sht::Errc::invalid_argument;
}

/// rho(0,1) = 1 with the given masses.
inline sht::SpacePtr two_point(double m0 = 0.5, double m1 = 0.5) {
  sht::Matrix rho(2, 2);
  rho << 0.0, 1.0, 1.0, 0.0;
  return sht::Space::create({"a", "b"}, rho, {m0, m1});
}

/// Points 0..n-1 on a line with |x - y|^s and unit masses.
inline sht::SpacePtr line(std::size_t n, double s = 1.0) {
  sht::Matrix rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      rho(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          std::pow(std::abs(static_cast<double>(x) - static_cast<double>(y)), s);
    }
  }
  std::vector<std::string> labels;
  for (std::size_t x = 0; x < n; ++x) labels.push_back(std::to_string(x));
  return sht::Space::create(labels, rho, std::vector<double>(n, 1.0));
}

inline sht::Grid default_grid(const sht::SpacePtr& space) {
  return sht::build_grid(space, sht::default_delta(*space));
}

/// Spaces with at most 8 points from every builder.
inline std::vector<sht::SpacePtr> small_zoo() {
  std::vector<sht::SpacePtr> out;
  for (std::size_t n = 1; n <= 8; ++n) out.push_back(sht::build_interval_space(n));
  for (int level = 0; level <= 3; ++level) out.push_back(sht::build_cantor_space(level));
  out.push_back(sht::build_snowflake_space(*sht::build_interval_space(8), 2.0));
  for (std::uint64_t seed = 1; seed <= 4; ++seed) out.push_back(sht::build_random_graph_space(5 + seed % 4, seed));
  out.push_back(two_point(0.25, 0.75));
  return out;
}

inline std::vector<double> lognormal(std::size_t n, double sigma, std::uint64_t seed) {
  sht::Rng rng = sht::make_rng(seed);
  return sht::lognormal_values(n, sigma, rng);
}

inline std::vector<double> normal(std::size_t n, std::uint64_t seed) {
  sht::Rng rng = sht::make_rng(seed);
  return sht::normal_values(n, rng);
}

}  // namespace fixtures
