#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "sht/dyadic.hpp"
#include "sht/space.hpp"

namespace sht {

enum class NormKind { exact, lower_bound, upper_bound };
enum class NormMethod { power_iteration, exhaustive, monte_carlo };

std::string_view to_string(NormKind kind);
std::string_view to_string(NormMethod method);

struct NormEstimate {
  double value = 0.0;
  NormKind kind = NormKind::lower_bound;
  NormMethod method = NormMethod::power_iteration;
  int iterations = 0;
  std::uint64_t seed = 0;
  /// Dense SVD value on tiny spaces (n <= 6), NaN otherwise.
  double cross_check = std::numeric_limits<double>::quiet_NaN();
  /// A maximizing function (in the original variables) when one is known.
  std::vector<double> argmax;
};

struct NormOptions {
  int trials = 64;
  std::uint64_t seed = 0;
  int max_iterations = 500;
  /// Extra starting points for the p != 2 ascent.
  std::vector<std::vector<double>> warm_starts;
};

/// ||A||_{L^p(v) -> L^p(w)} for the matrix action (Af)(x) = sum_y A(x,y) f(y).
/// p = 2 is exact (power iteration with repeated squaring on the conjugated
/// Gram matrix); other p give a lower bound from a multi-start Boyd ascent.
NormEstimate weighted_norm(const Matrix& action, const Space& space, double p,
                           std::span<const double> w, std::span<const double> v,
                           const NormOptions& options = {});

inline NormEstimate weighted_norm(const Matrix& action, const Space& space, double p,
                                  std::span<const double> w,
                                  const NormOptions& options = {}) {
  return weighted_norm(action, space, p, w, w, options);
}

/// ||M||_{L^p(w)}. M f = max over cube selections of linear averaging maps,
/// so the norm is the largest norm among them. All selections are tried
/// when there are at most `exhaustive_limit` of them (exact for p = 2);
/// otherwise a multi-start alternating ascent gives a lower bound.
NormEstimate maximal_norm(const Grid& grid, double p, std::span<const double> w,
                          const NormOptions& options = {},
                          std::size_t exhaustive_limit = 4096);

/// sup over lambda of lambda * w({|g| > lambda}); exact for a finite vector.
double weak_quasinorm(const Space& space, std::span<const double> g, std::span<const double> w);

/// max over candidate f of sup_lambda lambda w({|Af| > lambda}) / ||f||_{L^1(v)}.
NormEstimate weak_norm(const Matrix& action, const Grid& grid, std::span<const double> w,
                       std::span<const double> v, const NormOptions& options = {});

/// Structured and random test functions: point masses, CZ bad parts of
/// random functions, log-normal noise and signed noise.
std::vector<std::vector<double>> candidate_functions(const Grid& grid, std::size_t count,
                                                     std::uint64_t seed);

/// (sum |f|^p w mu)^(1/p).
double lp_norm(const Space& space, std::span<const double> f, double p,
               std::span<const double> w);

}  // namespace sht
