#include "sht/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sht/bmo.hpp"
#include "sht/error.hpp"
#include "sht/operators.hpp"
#include "sht/random.hpp"

namespace sht {

namespace {

constexpr double kIneqTol = 1e-9;

void require_size(const Grid& grid, std::span<const double> w) {
  if (w.size() != grid.space().size()) {
    throw Error(Errc::invalid_argument, "weight length does not match space");
  }
}

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(Errc::p_invalid, "p must lie in (1, inf)");
}

double dual_exponent(double p) { return p / (p - 1.0); }

std::vector<double> powered(std::span<const double> w, double e) {
  std::vector<double> out(w.size());
  for (std::size_t x = 0; x < w.size(); ++x) out[x] = std::pow(w[x], e);
  return out;
}

// Sum over members x of Q of g(M(w chi_Q)(x)) mu(x), for every cube Q.
template <typename G>
std::vector<double> local_maximal_sums(const Grid& grid, std::span<const double> w, G g) {
  const auto avg = grid.averages(w);
  std::vector<double> sums(grid.size(), 0.0);
  const Space& space = grid.space();
  for (std::size_t x = 0; x < space.size(); ++x) {
    double running = 0.0;
    std::optional<std::size_t> cur = grid.leaf()[x];
    while (cur) {
      running = std::max(running, avg[*cur]);
      sums[*cur] += g(running) * space.mu(x);
      cur = grid.cube(*cur).parent;
    }
  }
  return sums;
}

}  // namespace

double ap_constant(const Grid& grid, std::span<const double> w, double p) {
  require_p(p);
  require_size(grid, w);
  const auto sigma = powered(w, 1.0 - dual_exponent(p));
  const auto avg_w = grid.averages(w);
  const auto avg_s = grid.averages(sigma);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, avg_w[i] * std::pow(avg_s[i], p - 1.0));
  }
  return worst;
}

double a1_constant(const Grid& grid, std::span<const double> w) {
  require_size(grid, w);
  const auto avg = grid.averages(w);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto x : grid.cube(i).members) lo = std::min(lo, w[x]);
    worst = std::max(worst, avg[i] / lo);
  }
  return worst;
}

double ainf_fujii_wilson(const Grid& grid, std::span<const double> w) {
  require_size(grid, w);
  const auto sums = local_maximal_sums(grid, w, [](double m) { return m; });
  const auto avg = grid.averages(w);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, sums[i] / (avg[i] * grid.cube(i).mass));
  }
  return worst;
}

double ainf_hruscev(const Grid& grid, std::span<const double> w) {
  require_size(grid, w);
  std::vector<double> log_inv(w.size());
  for (std::size_t x = 0; x < w.size(); ++x) log_inv[x] = -std::log(w[x]);
  const auto avg = grid.averages(w);
  const auto avg_log = grid.averages(log_inv);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    worst = std::max(worst, avg[i] * std::exp(avg_log[i]));
  }
  return worst;
}

double rh_exponent(const Grid& grid, std::span<const double> w) {
  return 1.0 / (2.0 * ainf_fujii_wilson(grid, w) / grid.epsilon() - 1.0);
}

Weight::Weight(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)), cache_(std::make_shared<Cache>()) {
  if (!space_) throw Error(Errc::invalid_argument, "weight needs a space");
  if (values_.size() != space_->size()) {
    throw Error(Errc::invalid_argument, "weight length does not match space");
  }
  for (std::size_t x = 0; x < values_.size(); ++x) {
    if (!(values_[x] > 0.0) || !std::isfinite(values_[x])) {
      throw Error(Errc::invalid_argument, "weight must be positive and finite at " +
                                              std::to_string(x));
    }
  }
}

double Weight::mass(std::span<const std::size_t> members) const {
  double total = 0.0;
  for (const auto x : members) total += values_[x] * space_->mu(x);
  return total;
}

double Weight::cached(const std::string& kind, const Grid& grid, double p,
                      const std::function<double()>& compute) const {
  char key[96];
  std::snprintf(key, sizeof key, "%s/%llu/%.17g", kind.c_str(),
                static_cast<unsigned long long>(grid.id()), p);
  {
    std::lock_guard lock(cache_->mutex);
    if (const auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  }
  // Computed outside the lock; a racing duplicate produces the same bits.
  const double value = compute();
  std::lock_guard lock(cache_->mutex);
  return cache_->values.emplace(key, value).first->second;
}

double Weight::ap(const Grid& grid, double p) const {
  return cached("ap", grid, p, [&] { return ap_constant(grid, values_, p); });
}

double Weight::a1(const Grid& grid) const {
  return cached("a1", grid, 1.0, [&] { return a1_constant(grid, values_); });
}

double Weight::ainf_fw(const Grid& grid) const {
  return cached("fw", grid, 0.0, [&] { return ainf_fujii_wilson(grid, values_); });
}

double Weight::ainf_h(const Grid& grid) const {
  return cached("h", grid, 0.0, [&] { return ainf_hruscev(grid, values_); });
}

Weight Weight::dual(double p) const {
  require_p(p);
  return Weight(space_, powered(values_, 1.0 - dual_exponent(p)));
}

Weight power_weight(SpacePtr space, double a) {
  if (!space || !space->has_coordinates()) {
    throw Error(Errc::invalid_argument, "power weights need point coordinates");
  }
  std::vector<double> values(space->size());
  const auto coords = space->coordinates();
  for (std::size_t x = 0; x < values.size(); ++x) {
    if (!(coords[x] > 0.0)) throw Error(Errc::invalid_argument, "power weights need x > 0");
    values[x] = std::pow(coords[x], a);
  }
  return Weight(std::move(space), std::move(values));
}

ReverseHolderReport verify_reverse_holder(const Grid& grid, std::span<const double> w,
                                          std::optional<double> r) {
  require_size(grid, w);
  ReverseHolderReport report;
  report.ainf = ainf_fujii_wilson(grid, w);
  report.r = r.value_or(1.0 / (2.0 * report.ainf / grid.epsilon() - 1.0));
  const double e = 1.0 + report.r;
  const auto avg = grid.averages(w);
  const auto avg_pow = grid.averages(powered(w, e));
  const auto max_sums = local_maximal_sums(grid, w, [e](double m) { return std::pow(m, e); });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double base = std::pow(avg[i], e);
    const double holder = avg_pow[i] / base / 2.0;
    if (holder > report.holder.worst_ratio) {
      report.holder.worst_ratio = holder;
      report.holder.worst_cube = i;
    }
    const double maxl = max_sums[i] / grid.cube(i).mass / base / (2.0 * report.ainf);
    if (maxl > report.maximal.worst_ratio) {
      report.maximal.worst_ratio = maxl;
      report.maximal.worst_cube = i;
    }
  }
  report.holder.passed = report.holder.worst_ratio <= 1.0 + kIneqTol;
  report.maximal.passed = report.maximal.worst_ratio <= 1.0 + kIneqTol;
  return report;
}

LevelSetReport levelset_inequality_check(const Grid& grid, std::span<const double> w, double p,
                                         std::size_t subset_cap, std::uint64_t seed) {
  require_p(p);
  require_size(grid, w);
  const Space& space = grid.space();
  LevelSetReport report;
  report.ap = ap_constant(grid, w, p);
  const auto check = [&](double mu_a, double w_a, double mu_q, double w_q) {
    ++report.checks;
    if (mu_a == 0.0) return;
    const double lhs = std::pow(mu_a / mu_q, p);
    const double rhs = report.ap * w_a / w_q;
    const double ratio = lhs / rhs;
    report.worst = std::max(report.worst, ratio);
    if (ratio > 1.0 + kIneqTol) ++report.violations;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    const std::size_t s = q.members.size();
    double w_q = 0.0;
    for (const auto x : q.members) w_q += w[x] * space.mu(x);
    const bool all = s < 63 && (std::uint64_t{1} << s) <= subset_cap;
    if (all) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
        double mu_a = 0.0;
        double w_a = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
          if ((mask >> j) & 1U) {
            mu_a += space.mu(q.members[j]);
            w_a += w[q.members[j]] * space.mu(q.members[j]);
          }
        }
        check(mu_a, w_a, q.mass, w_q);
      }
      continue;
    }
    report.exhaustive = false;
    for (const auto x : q.members) check(space.mu(x), w[x] * space.mu(x), q.mass, w_q);
    Rng rng = make_rng(seed, i);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t t = 0; t < subset_cap; ++t) {
      double mu_a = 0.0;
      double w_a = 0.0;
      for (const auto x : q.members) {
        if (coin(rng)) {
          mu_a += space.mu(x);
          w_a += w[x] * space.mu(x);
        }
      }
      check(mu_a, w_a, q.mass, w_q);
    }
  }
  report.passed = report.violations == 0;
  return report;
}

FactorReport factor_check(const Grid& grid, std::span<const double> w,
                          std::span<const double> u, double p, double p0) {
  require_size(grid, w);
  require_size(grid, u);
  FactorReport report;
  const double u_a1 = a1_constant(grid, u);
  std::vector<double> composite(w.size());
  if (p >= 1.0 && p < p0) {
    report.which_case = 1;
    for (std::size_t x = 0; x < w.size(); ++x) composite[x] = w[x] * std::pow(u[x], p - p0);
    const double w_const = p == 1.0 ? a1_constant(grid, w) : ap_constant(grid, w, p);
    report.bound = w_const * std::pow(u_a1, p0 - p);
  } else if (p0 > 1.0 && p0 < p) {
    report.which_case = 2;
    for (std::size_t x = 0; x < w.size(); ++x) {
      composite[x] = std::pow(std::pow(w[x], p0 - 1.0) * std::pow(u[x], p - p0), 1.0 / (p - 1.0));
    }
    report.bound = std::pow(ap_constant(grid, w, p), (p0 - 1.0) / (p - 1.0)) *
                   std::pow(u_a1, (p - p0) / (p - 1.0));
  } else {
    throw Error(Errc::exponent_order, "need 1 <= p < p0 or 1 < p0 < p");
  }
  report.composite = ap_constant(grid, composite, p0);
  report.passed = report.composite <= report.bound * (1.0 + kIneqTol);
  return report;
}

RubioDeFranciaResult rubio_de_francia(const Grid& grid, std::span<const double> f, double p,
                                      std::span<const double> w, const NormOptions& options) {
  require_p(p);
  require_size(grid, f);
  require_size(grid, w);
  for (const double v : f) {
    if (!(v >= 0.0)) throw Error(Errc::invalid_argument, "f must be nonnegative");
  }
  const Space& space = grid.space();
  RubioDeFranciaResult result;
  result.estimate = maximal_norm(grid, p, w, options);
  const double n0 = result.estimate.value;
  if (!std::isfinite(n0) || !(n0 > 0.0)) {
    throw Error(Errc::norm_estimate_failed, "maximal operator norm estimate is not usable");
  }
  const double f_norm = lp_norm(space, f, p, w);
  if (f_norm == 0.0) {
    result.rf.assign(f.size(), 0.0);
    result.norm = n0;
    result.a1 = 0.0;
    return result;
  }
  const double f_sup = *std::max_element(f.begin(), f.end());

  std::vector<std::vector<double>> iterates{std::vector<double>(f.begin(), f.end())};
  std::vector<double> growth{1.0};  // (||M^k f|| / ||f||)^{1/k}
  double norm = n0;
  std::vector<double> sum;
  const auto partial = [&](double n) {
    std::vector<double> s(f.size(), 0.0);
    double factor = 1.0;
    for (const auto& it : iterates) {
      for (std::size_t x = 0; x < s.size(); ++x) s[x] += it[x] * factor;
      factor /= 2.0 * n;
    }
    return s;
  };
  for (int guard = 0; guard < 8; ++guard) {
    while (true) {
      sum = partial(norm);
      const double lo = *std::min_element(sum.begin(), sum.end());
      const auto k = static_cast<double>(iterates.size() - 1);
      const double tail = f_sup * std::pow(2.0 * norm, -k) / (2.0 * norm - 1.0);
      if (tail <= 1e-12 * lo || iterates.size() > 400) break;
      iterates.push_back(maximal(grid, iterates.back()));
      const double ratio = lp_norm(space, iterates.back(), p, w) / f_norm;
      growth.push_back(std::pow(ratio, 1.0 / static_cast<double>(iterates.size() - 1)));
    }
    const double observed = *std::max_element(growth.begin() + 1, growth.end());
    const double next = std::max(n0, observed);
    if (next == norm) break;
    norm = next;
  }
  sum = partial(norm);
  result.norm = norm;
  result.terms = static_cast<int>(iterates.size());
  result.rf = sum;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (result.rf[x] < f[x]) result.majorizes = false;
  }
  result.norm_ratio = lp_norm(space, result.rf, p, w) / f_norm;
  result.a1 = a1_constant(grid, result.rf);
  result.passed = result.majorizes && result.norm_ratio <= 2.0 * (1.0 + kIneqTol) &&
                  result.a1 <= 2.0 * norm * (1.0 + kIneqTol);
  return result;
}

CoifmanRochbergReport coifman_rochberg_check(const Grid& grid, std::span<const double> f,
                                             double r) {
  require_size(grid, f);
  if (!(r > 1.0) || !std::isfinite(r)) throw Error(Errc::r_invalid, "r must lie in (1, inf)");
  if (std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; })) {
    throw Error(Errc::zero_function, "f vanishes identically");
  }
  auto g = maximal(grid, f);
  for (auto& v : g) v = std::pow(v, 1.0 / r);
  CoifmanRochbergReport report;
  report.a1 = a1_constant(grid, g);
  report.r_dual = dual_exponent(r);
  report.ratio = report.a1 / report.r_dual;
  return report;
}

ExtrapolationResult extrapolation_constant(const Grid& grid, std::span<const double> w, double p,
                                           double p0, const std::function<double(double)>& n_fn,
                                           const NormOptions& options) {
  require_p(p);
  require_size(grid, w);
  if (!(p0 >= 1.0) || !std::isfinite(p0)) throw Error(Errc::p_invalid, "p0 must be >= 1");
  if (p == p0) throw Error(Errc::case_mismatch, "p equals p0");
  ExtrapolationResult result;
  const double ap = ap_constant(grid, w, p);
  if (p < p0) {
    result.which_case = 1;
    result.maximal_norm = maximal_norm(grid, p, w, options).value;
    result.argument = ap * std::pow(2.0 * result.maximal_norm, p0 - p);
  } else {
    result.which_case = 2;
    const double q = dual_exponent(p);
    const auto sigma = powered(w, 1.0 - q);
    result.maximal_norm = maximal_norm(grid, q, sigma, options).value;
    result.argument = std::pow(ap, (p0 - 1.0) / (p - 1.0)) *
                      std::pow(2.0 * result.maximal_norm, (p - p0) / (p - 1.0));
  }
  result.k = n_fn(result.argument);
  return result;
}

ConjugatedWeightReport conjugated_weight_check(const Grid& grid, std::span<const double> w,
                                               std::span<const double> b, int steps) {
  require_size(grid, w);
  require_size(grid, b);
  if (steps < 1) throw Error(Errc::invalid_argument, "steps must be positive");
  ConjugatedWeightReport report;
  const double norm = bmo_norm(grid, b);
  const double a2 = ap_constant(grid, w, 2.0);
  const double fw = ainf_fujii_wilson(grid, w);
  const auto sigma = powered(w, -1.0);
  const double fs = ainf_fujii_wilson(grid, sigma);
  const double alpha = jn_alpha(grid);
  const double tau = 2.0 / grid.epsilon();
  report.bmo_zero = norm == 0.0;
  if (report.bmo_zero) {
    report.radius_a2 = report.radius_ainf = 1.0;
  } else {
    report.radius_a2 = alpha / (norm * (fw + fs));
    report.radius_ainf = alpha / (4.0 * tau) / (norm * fw);
    const double beta = jn_check(grid, b).sup;
    report.reference_a2 = 4.0 * beta * beta;
  }
  std::vector<double> wz(w.size());
  const auto conjugate = [&](double z) {
    for (std::size_t x = 0; x < w.size(); ++x) wz[x] = w[x] * std::exp(2.0 * z * b[x]);
  };
  bool finite = true;
  for (int j = -steps; j <= steps; ++j) {
    const double z2 = report.radius_a2 * j / steps;
    conjugate(z2);
    const double ra2 = ap_constant(grid, wz, 2.0) / a2;
    report.a2_samples.push_back({z2, ra2});
    report.max_ratio_a2 = std::max(report.max_ratio_a2, ra2);
    const double zi = report.radius_ainf * j / steps;
    conjugate(zi);
    const double rinf = ainf_fujii_wilson(grid, wz) / fw;
    report.ainf_samples.push_back({zi, rinf});
    report.max_ratio_ainf = std::max(report.max_ratio_ainf, rinf);
    finite = finite && std::isfinite(ra2) && std::isfinite(rinf);
    if (report.bmo_zero) {
      finite = finite && std::abs(ra2 - 1.0) <= kIneqTol && std::abs(rinf - 1.0) <= kIneqTol;
    }
  }
  report.passed = finite;
  return report;
}

}  // namespace sht
