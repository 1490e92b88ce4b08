#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "sht/dyadic.hpp"

namespace sht {

/// b_Q, the mu-average of b over cube Q.
double cube_mean(const Grid& grid, std::span<const double> b, std::size_t cube);

/// Dyadic BMO norm: max over cubes of avg_Q |b - b_Q|.
double bmo_norm(const Grid& grid, std::span<const double> b);

struct ParentJumpReport {
  /// max over parent/child pairs of |b_Q - b_parent| / (||b||_BMO / epsilon).
  double worst_ratio = 0.0;
  std::optional<std::size_t> worst_cube;
  bool passed = true;
};

ParentJumpReport parent_jump_check(const Grid& grid, std::span<const double> b);

struct JohnNirenbergReport {
  double norm = 0.0;
  double alpha = 0.0;
  /// epsilon ln 2 / (2 epsilon + 1): the largest alpha the stopping-time
  /// argument accepts.
  double threshold = 0.0;
  /// sup over cubes of avg_Q exp(alpha |b - b_Q| / ||b||_BMO).
  double sup = 1.0;
  std::optional<std::size_t> worst_cube;
  /// e^{2 alpha} / (1 - e^{(1/epsilon + 2) alpha} / 2), infinite when the
  /// denominator is not positive.
  double bound = 0.0;
  bool passed = true;
};

/// Exponential integrability at alpha (defaults to (epsilon/3) ln 2). A
/// constant b passes with every average equal to 1.
JohnNirenbergReport jn_check(const Grid& grid, std::span<const double> b,
                             std::optional<double> alpha = std::nullopt);

/// (epsilon / 3) ln 2 for the grid's epsilon.
double jn_alpha(const Grid& grid);

}  // namespace sht
