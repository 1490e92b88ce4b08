#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sht/space.hpp"

namespace sht {

/// One cube of a dyadic grid. Larger levels are coarser; children sit one
/// level below their parent.
struct Cube {
  int level = 0;
  std::size_t center = 0;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  std::vector<std::size_t> members;  // sorted point indices
  double mass = 0.0;
};

/// Handle to a cube that remembers which grid it came from.
struct CubeRef {
  std::uint64_t grid_id = 0;
  std::size_t cube = 0;
};

/// Leveled forest of cubes over a finite space. Cubes are stored top-down:
/// every parent precedes its children, and cubes within a level are ordered
/// by center index.
///
/// The cube at level k is sandwiched between open balls of radius scale(k)
/// and c_sandwich() * scale(k) around its center, with scale(k) =
/// delta^(-k).
class Grid {
 public:
  /// Assembles a grid from raw cubes without checking any of the six grid
  /// properties (use verify_grid for that). Children lists and masses are
  /// recomputed from the parent links and member lists.
  static Grid assemble(SpacePtr space, double delta, double epsilon,
                       double c_sandwich, std::vector<Cube> cubes);

  const Space& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::uint64_t id() const { return id_; }

  double delta() const { return delta_; }
  double epsilon() const { return epsilon_; }
  double c_sandwich() const { return c_sandwich_; }
  double scale(int level) const;

  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  std::size_t level_count() const { return static_cast<std::size_t>(k_max_ - k_min_ + 1); }

  std::span<const Cube> cubes() const { return cubes_; }
  const Cube& cube(std::size_t i) const { return cubes_[i]; }
  std::size_t size() const { return cubes_.size(); }
  /// Cube indices at level k, ordered by center.
  std::span<const std::size_t> level(int k) const;

  /// Index of the finest cube containing each point (the grid's leaf for x).
  std::span<const std::size_t> leaf() const { return leaf_; }

  CubeRef ref(std::size_t cube) const { return {id_, cube}; }

  /// Average of f over each cube, in cube order.
  std::vector<double> averages(std::span<const double> f) const;

  /// True if `inner` is `outer` or one of its descendants.
  bool contains(std::size_t outer, std::size_t inner) const;

 private:
  SpacePtr space_;
  std::uint64_t id_ = 0;
  double delta_ = 0.0;
  double epsilon_ = 0.0;
  double c_sandwich_ = 0.0;
  int k_min_ = 0;
  int k_max_ = 0;
  std::vector<Cube> cubes_;
  std::vector<std::vector<std::size_t>> levels_;  // indexed by k - k_min
  std::vector<std::size_t> leaf_;
};

/// Builds a grid by nested greedy nets. The net at level k is a maximal
/// (3 kappa^2 scale(k))-separated set extending the coarser net, taken in
/// order of descending mass (ties by index). Each center's parent is itself
/// when it is also a coarser center, otherwise the nearest coarser center
/// (ties by index). Cubes are unions of their children, so partition and
/// nesting hold by construction; epsilon and c_sandwich are measured on the
/// result. Throws DeltaTooLarge if the built grid fails verify_grid.
Grid build_grid(SpacePtr space, double delta);

/// Default grid parameter for a space: 1/(8 kappa^3).
double default_delta(const Space& space);

struct PropertyCheck {
  bool passed = true;
  std::string witness;  // empty when passed
};

/// Outcome of checking the six dyadic-grid properties:
/// partition, nesting, children, unique parent, mass ratio, sandwich.
struct GridReport {
  std::array<PropertyCheck, 6> property;
  bool all_passed() const;
};

GridReport verify_grid(const Grid& grid);

/// Maximal cubes whose average of f exceeds lambda, in cube order.
/// Every selected cube with a parent also has average <= lambda / epsilon.
std::vector<std::size_t> cz_decompose(const Grid& grid, std::span<const double> f,
                                      double lambda);

struct SparseFamily {
  const Grid* grid = nullptr;
  std::vector<std::size_t> cubes;  // cube order (top-down)
};

struct SparsityReport {
  bool sparse = true;
  double worst_ratio = 0.0;
  std::optional<std::size_t> worst_cube;
};

/// max over Q of mu(union of family cubes strictly below Q) / mu(Q).
SparsityReport is_sparse(const Grid& grid, std::span<const CubeRef> cubes);
SparsityReport is_sparse(const SparseFamily& family);

/// E(Q) = Q minus the family cubes strictly below Q, one set per family cube.
std::vector<std::vector<std::size_t>> designated_sets(const SparseFamily& family);

namespace selection {
/// Every cube of the grid, thinned greedily.
struct AllLevels {};
/// Union of cz_decompose families of |f| at lambda = 2^m.
struct CzStack {
  std::vector<double> f;
};
/// Each cube kept with probability p, then thinned.
struct Random {
  double p = 0.5;
  std::uint64_t seed = 0;
};
/// A caller-chosen candidate list, thinned.
struct Explicit {
  std::vector<std::size_t> cubes;
};
}  // namespace selection

using SelectionRule =
    std::variant<selection::AllLevels, selection::CzStack, selection::Random,
                 selection::Explicit>;

/// Candidates from the rule are admitted top-down; a cube is admitted only if
/// the sparsity bound of its nearest admitted ancestor survives. The result is
/// always sparse and depends only on (grid, rule).
SparseFamily extract_sparse(const Grid& grid, const SelectionRule& rule);

}  // namespace sht
