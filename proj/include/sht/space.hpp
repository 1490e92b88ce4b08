#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sht {

using Matrix = Eigen::MatrixXd;

/// Relative tolerance used by every certifier comparison.
inline constexpr double kRelTol = 1e-12;

/// Open-ball membership test. Distances within kRelTol of the radius count as
/// boundary points and are excluded, so last-bit noise cannot flip a verdict.
inline bool within_open(double distance, double radius) {
  return distance < radius * (1.0 - kRelTol);
}

struct Ball {
  std::size_t center = 0;
  double radius = 0.0;
  std::vector<std::size_t> members;
};

/// Smallest kappa with rho(x,z) <= kappa (rho(x,y) + rho(y,z)) over all
/// triples. Validates the matrix first (square, symmetric, nonnegative, zero
/// exactly on the diagonal).
double certify_quasimetric(const Matrix& rho);

class Space;
using SpacePtr = std::shared_ptr<const Space>;

/// A finite space of homogeneous type: quasimetric matrix plus positive point
/// masses, with its quasimetric and doubling constants certified on creation.
/// Immutable once built.
class Space {
 public:
  static SpacePtr create(std::vector<std::string> labels, Matrix rho,
                         std::vector<double> mu,
                         std::vector<double> coordinates = {});

  std::size_t size() const { return mu_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Matrix& rho() const { return rho_; }
  double rho(std::size_t x, std::size_t y) const { return rho_(x, y); }
  std::span<const double> mu() const { return mu_; }
  double mu(std::size_t x) const { return mu_[x]; }

  double kappa() const { return kappa_; }
  double doubling() const { return doubling_; }
  double diameter() const { return diameter_; }
  /// Smallest positive distance; 0 for a single point.
  double min_distance() const { return min_distance_; }
  double total_mass() const { return total_mass_; }

  /// Real coordinates of the points when the space came from a builder that
  /// has them (interval, Cantor); empty otherwise.
  std::span<const double> coordinates() const { return coordinates_; }
  bool has_coordinates() const { return !coordinates_.empty(); }

  /// mu(B(center, radius)) with B open.
  double ball_mass(std::size_t center, double radius) const;
  Ball ball(std::size_t center, double radius) const;

  double mass(std::span<const std::size_t> members) const;
  /// Sum of f * mu over all points.
  double integrate(std::span<const double> f) const;

 private:
  Space() = default;

  std::vector<std::string> labels_;
  Matrix rho_;
  std::vector<double> mu_;
  std::vector<double> coordinates_;
  // Per point: distances to all points sorted ascending, with running masses.
  std::vector<std::vector<double>> sorted_dist_;
  std::vector<std::vector<double>> cumulative_mass_;
  double kappa_ = 1.0;
  double doubling_ = 1.0;
  double diameter_ = 0.0;
  double min_distance_ = 0.0;
  double total_mass_ = 0.0;

  friend double certify_doubling(const Space& space);
};

/// max over points x and realized radii r of mu(B(x,2r)) / mu(B(x,r)).
/// Between consecutive distances from x the denominator is constant and the
/// numerator is largest at the right endpoint, so scanning each point's own
/// distances gives the exact supremum over all r > 0.
double certify_doubling(const Space& space);

/// Grid {(k + 1/2)/n : 0 <= k < n} with Euclidean distance and mass 1/n.
SpacePtr build_interval_space(std::size_t n);

/// Midpoints of the 2^level intervals of the middle-thirds construction,
/// uniform mass 2^-level.
SpacePtr build_cantor_space(int level);

/// Same points and masses as `base`, with distances raised to the power s.
SpacePtr build_snowflake_space(const Space& base, double s);

/// Shortest-path metric of a connected random weighted graph on n vertices
/// (ring plus random chords), with random masses in [0.5, 2].
SpacePtr build_random_graph_space(std::size_t n, std::uint64_t seed);

}  // namespace sht
