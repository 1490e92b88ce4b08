#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sht/dyadic.hpp"
#include "sht/norms.hpp"

namespace sht {

// Characteristics over the cubes of one grid, on raw positive values.
double ap_constant(const Grid& grid, std::span<const double> w, double p);
double a1_constant(const Grid& grid, std::span<const double> w);
double ainf_fujii_wilson(const Grid& grid, std::span<const double> w);
double ainf_hruscev(const Grid& grid, std::span<const double> w);
/// 1 / (2 D [w]_inf - 1) with D = 1 / epsilon.
double rh_exponent(const Grid& grid, std::span<const double> w);

/// Strictly positive function on a space, with a write-once cache of its
/// characteristics keyed by (kind, grid id, p). Copies share the cache.
class Weight {
 public:
  Weight(SpacePtr space, std::vector<double> values);

  const Space& space() const { return *space_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t x) const { return values_[x]; }
  std::size_t size() const { return values_.size(); }

  /// w(S) = sum over S of w mu.
  double mass(std::span<const std::size_t> members) const;

  double ap(const Grid& grid, double p) const;
  double a1(const Grid& grid) const;
  double ainf_fw(const Grid& grid) const;
  double ainf_h(const Grid& grid) const;

  /// w^{1-p'}.
  Weight dual(double p) const;

 private:
  double cached(const std::string& kind, const Grid& grid, double p,
                const std::function<double()>& compute) const;

  struct Cache {
    std::mutex mutex;
    std::map<std::string, double> values;
  };

  SpacePtr space_;
  std::vector<double> values_;
  std::shared_ptr<Cache> cache_;
};

/// x^a on a space with coordinates.
Weight power_weight(SpacePtr space, double a);

struct CubeCheck {
  double worst_ratio = 0.0;  // left side over the allowed right side
  std::optional<std::size_t> worst_cube;
  bool passed = true;
};

struct ReverseHolderReport {
  double r = 0.0;
  double ainf = 1.0;
  /// Largest avg_Q w^{1+r} / (avg_Q w)^{1+r}; must stay <= 2.
  CubeCheck holder;
  /// Largest avg_Q M(w chi_Q)^{1+r} / (avg_Q w)^{1+r}; must stay <= 2 [w]_inf.
  CubeCheck maximal;
};

/// Both inequalities on every cube at r = rh_exponent (or the given r).
/// Pass iff the ratios stay within 1e-9 relative of 2 and 2 [w]_inf.
ReverseHolderReport verify_reverse_holder(const Grid& grid, std::span<const double> w,
                                          std::optional<double> r = std::nullopt);

struct LevelSetReport {
  double ap = 1.0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  /// Largest (mu(A)/mu(Q))^p / ([w]_{A_p} w(A)/w(Q)).
  double worst = 0.0;
  bool exhaustive = true;
  bool passed = true;
};

/// Every subset A of every cube when 2^|Q| <= subset_cap, otherwise
/// subset_cap random subsets plus all singletons.
LevelSetReport levelset_inequality_check(const Grid& grid, std::span<const double> w, double p,
                                         std::size_t subset_cap, std::uint64_t seed);

struct FactorReport {
  int which_case = 1;
  double composite = 1.0;  // A_{p0} constant of the composite weight
  double bound = 1.0;
  bool passed = true;
};

/// Case 1 (1 <= p < p0): [w u^{p-p0}]_{A_p0} <= [w]_{A_p} [u]_{A_1}^{p0-p},
/// reading [w]_{A_1} when p = 1. Case 2 (1 < p0 < p):
/// [(w^{p0-1} u^{p-p0})^{1/(p-1)}]_{A_p0} <= [w]_{A_p}^{(p0-1)/(p-1)} [u]_{A_1}^{(p-p0)/(p-1)}.
FactorReport factor_check(const Grid& grid, std::span<const double> w,
                          std::span<const double> u, double p, double p0);

struct RubioDeFranciaResult {
  std::vector<double> rf;
  /// The norm used in the series: max of the estimate of ||M||_{L^p(w)} and
  /// the observed growth (||M^k f|| / ||f||)^{1/k} of the computed iterates.
  double norm = 1.0;
  NormEstimate estimate;
  int terms = 0;
  bool majorizes = true;
  double norm_ratio = 0.0;  // ||Rf|| / ||f||, must be <= 2
  double a1 = 1.0;          // [Rf]_{A_1}, must be <= 2 norm
  bool passed = true;
};

/// Rf = sum_k M^k f / (2 ||M||)^k, truncated once the tail bound falls below
/// 1e-12 of the partial sum. All three properties are checked on return.
RubioDeFranciaResult rubio_de_francia(const Grid& grid, std::span<const double> f, double p,
                                      std::span<const double> w, const NormOptions& options = {});

struct CoifmanRochbergReport {
  double a1 = 1.0;     // [(Mf)^{1/r}]_{A_1}
  double r_dual = 0.0;  // r'
  double ratio = 0.0;   // a1 / r'
};

CoifmanRochbergReport coifman_rochberg_check(const Grid& grid, std::span<const double> f,
                                             double r);

struct ExtrapolationResult {
  double k = 0.0;
  double argument = 0.0;     // the value N is applied to
  double maximal_norm = 0.0;  // ||M||_{L^p(w)} or ||M||_{L^p'(sigma)}
  int which_case = 1;
};

/// K(w) with N applied to the whole product:
/// p < p0: N([w]_{A_p} (2 ||M||_{L^p(w)})^{p0-p}),
/// p > p0: N([w]_{A_p}^{(p0-1)/(p-1)} (2 ||M||_{L^{p'}(sigma)})^{(p-p0)/(p-1)}).
ExtrapolationResult extrapolation_constant(const Grid& grid, std::span<const double> w, double p,
                                           double p0, const std::function<double(double)>& n_fn,
                                           const NormOptions& options = {});

struct ConjugatedWeightReport {
  double radius_a2 = 0.0;   // alpha / (||b|| ([w]_inf + [sigma]_inf))
  double radius_ainf = 0.0;  // (alpha / 4 tau) / (||b|| [w]_inf), tau = 2 / epsilon
  double max_ratio_a2 = 1.0;
  double max_ratio_ainf = 1.0;
  /// 4 beta^2 with beta the measured John-Nirenberg supremum; for reference.
  double reference_a2 = 0.0;
  bool bmo_zero = false;
  bool passed = true;
  struct Sample {
    double z;
    double ratio;
  };
  std::vector<Sample> a2_samples;
  std::vector<Sample> ainf_samples;
};

/// [w e^{2zb}]_{A_2} / [w]_{A_2} and the A_inf analogue for real z on a
/// symmetric grid of `steps` points per side inside each admissible radius.
ConjugatedWeightReport conjugated_weight_check(const Grid& grid, std::span<const double> w,
                                               std::span<const double> b, int steps);

}  // namespace sht
