#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sht/dyadic.hpp"
#include "sht/space.hpp"

namespace sht {

/// Mf(x) = max over cubes Q containing x of the average of |f| over Q.
std::vector<double> maximal(const Grid& grid, std::span<const double> f);

/// M_r f = (M(|f|^r))^(1/r).
std::vector<double> maximal_r(const Grid& grid, std::span<const double> f, double r);

/// M(f chi_Q) restricted to Q: at each member of Q, the largest average of
/// |f| over cubes R with x in R and R inside Q. Returned in member order.
std::vector<double> maximal_local(const Grid& grid, std::span<const double> f, std::size_t cube);

/// Cube selected by M at each point for |f| (the coarsest one on ties).
std::vector<std::size_t> maximal_selection(const Grid& grid, std::span<const double> f);

/// T^S f = sum over Q in S of avg_Q(f) chi_Q.
std::vector<double> sparse_apply(const SparseFamily& family, std::span<const double> f);

/// Matrix A with (T^S f)(x) = sum_y A(x,y) f(y).
Matrix sparse_matrix(const SparseFamily& family);

/// S_Q f: the sparse operator restricted to family cubes inside Q.
std::vector<double> sparse_apply_local(const SparseFamily& family, std::span<const double> f,
                                       std::size_t cube);

struct KernelCertification {
  double c_decay = 0.0;
  double eta = 0.0;
  double c_smooth = 0.0;
  /// Admissible triples are those with rho(x0,x) <= threshold * rho(x0,y).
  /// The ladder uses the Hoelder exponent as the threshold.
  double eta_admissible_threshold = 0.0;
  /// False when no rung of the ladder met the cap; eta is then the last rung.
  bool within_cap = false;
  double cap = 16.0;
  struct Rung {
    double eta;
    double c_smooth;
  };
  std::vector<Rung> ladder;
};

/// Smallest decay constant over all pairs and, down the ladder eta = 1/2,
/// 1/4, ..., the smallest smoothness constant over admissible triples for
/// both variables. Stops at the first rung whose constant is within `cap`.
KernelCertification certify_kernel(const Matrix& kernel, const Space& space, double cap = 16.0);

/// K(x,y) = sgn(x - y) / mu(B(x, rho(x,y))) ordered by point index, K(x,x) = 0.
Matrix graded_sign_kernel(const Space& space);

/// Matrix A with (Tf)(x) = sum_y K(x,y) f(y) mu(y).
Matrix kernel_action(const Matrix& kernel, const Space& space);

std::vector<double> kernel_apply(const Matrix& kernel, const Space& space,
                                 std::span<const double> f);

/// Kernel (b(x) - b(y))^k K(x,y).
Matrix commutator_kernel(const Matrix& kernel, std::span<const double> b, int k);

std::vector<double> commutator_apply(const Matrix& kernel, const Space& space,
                                     std::span<const double> b, int k,
                                     std::span<const double> f);

/// T_z f = e^{zb} T(e^{-zb} f) for real z. Throws Overflow once
/// |z| * (max b - min b) exceeds 700.
std::vector<double> conjugated_apply(const Matrix& kernel, const Space& space,
                                     std::span<const double> b, double z,
                                     std::span<const double> f);

/// Mean-zero atoms and the other structured test functions used by the
/// domination and localization checks.
struct DominationReport {
  double constant = 0.0;  // max ratio over trials
  std::size_t trials = 0;
  std::vector<double> ratios;
};

/// ||Tf||_{L^p(w)} / max over generated sparse families S of ||T^S |f|||_{L^p(w)}.
DominationReport lerner_domination_check(const Matrix& kernel, const Grid& grid, double p,
                                         std::span<const double> w, std::size_t trials,
                                         std::uint64_t seed);

struct OffSupportReport {
  double constant = 0.0;
  std::size_t trials = 0;
  std::size_t nontrivial = 0;  // trials whose right side was positive
};

/// Measures C in int_{X minus Q~} |T a| w <= C int |a| M w over random
/// mean-zero atoms on random cubes and random weights.
OffSupportReport offsupport_bound_check(const Matrix& kernel, const Grid& grid,
                                        std::size_t trials, std::uint64_t seed);

/// Right side and left side for one atom; throws AtomNotMeanZero.
struct AtomSides {
  double off_support = 0.0;
  double maximal_side = 0.0;
};
AtomSides offsupport_sides(const Matrix& kernel, const Grid& grid, std::size_t cube,
                           std::span<const double> atom, std::span<const double> w);

/// Open ball around the cube's center of radius 2 kappa C scale(level).
std::vector<std::size_t> dilated_cube(const Grid& grid, std::size_t cube);

struct LocalizationReport {
  double constant = 1.0;  // max over trials and CZ cubes of sup/inf
  std::size_t trials = 0;
  std::size_t cubes_checked = 0;
};

/// sup over Q_j of M_r(w chi_{complement of Omega~}) divided by its inf over
/// Q_j, where Omega~ is the union of the dilated CZ cubes of random f.
LocalizationReport maximal_localization_check(const Grid& grid, std::span<const double> w,
                                              double r, std::size_t trials,
                                              std::uint64_t seed);

}  // namespace sht
