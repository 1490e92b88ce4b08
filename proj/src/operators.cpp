#include "sht/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sht/error.hpp"
#include "sht/norms.hpp"
#include "sht/random.hpp"

namespace sht {

namespace {

std::vector<double> abs_values(std::span<const double> f) {
  std::vector<double> out(f.size());
  std::transform(f.begin(), f.end(), out.begin(), [](double v) { return std::abs(v); });
  return out;
}

void require_size(const Space& space, std::span<const double> f) {
  if (f.size() != space.size()) {
    throw Error(Errc::invalid_argument, "function length " + std::to_string(f.size()) +
                                            " does not match space size " +
                                            std::to_string(space.size()));
  }
}

}  // namespace

std::vector<double> maximal(const Grid& grid, std::span<const double> f) {
  require_size(grid.space(), f);
  const auto avg = grid.averages(abs_values(f));
  std::vector<double> running(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto parent = grid.cube(i).parent;
    running[i] = parent ? std::max(avg[i], running[*parent]) : avg[i];
  }
  std::vector<double> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = running[grid.leaf()[x]];
  return out;
}

std::vector<double> maximal_r(const Grid& grid, std::span<const double> f, double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw Error(Errc::r_invalid, "r must be >= 1");
  if (r == 1.0) return maximal(grid, f);
  std::vector<double> powered(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) powered[x] = std::pow(std::abs(f[x]), r);
  auto out = maximal(grid, powered);
  for (auto& v : out) v = std::pow(v, 1.0 / r);
  return out;
}

std::vector<double> maximal_local(const Grid& grid, std::span<const double> f, std::size_t cube) {
  require_size(grid.space(), f);
  const auto avg = grid.averages(abs_values(f));
  const Cube& q = grid.cube(cube);
  std::vector<double> out;
  out.reserve(q.members.size());
  for (const auto x : q.members) {
    double best = 0.0;
    std::optional<std::size_t> cur = grid.leaf()[x];
    while (cur) {
      best = std::max(best, avg[*cur]);
      if (*cur == cube) break;
      cur = grid.cube(*cur).parent;
    }
    out.push_back(best);
  }
  return out;
}

std::vector<std::size_t> maximal_selection(const Grid& grid, std::span<const double> f) {
  require_size(grid.space(), f);
  const auto avg = grid.averages(abs_values(f));
  std::vector<std::size_t> best(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto parent = grid.cube(i).parent;
    best[i] = (parent && avg[best[*parent]] >= avg[i]) ? best[*parent] : i;
  }
  std::vector<std::size_t> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = best[grid.leaf()[x]];
  return out;
}

std::vector<double> sparse_apply(const SparseFamily& family, std::span<const double> f) {
  const Grid& grid = *family.grid;
  require_size(grid.space(), f);
  const auto avg = grid.averages(f);
  std::vector<double> out(f.size(), 0.0);
  for (const auto c : family.cubes) {
    for (const auto x : grid.cube(c).members) out[x] += avg[c];
  }
  return out;
}

Matrix sparse_matrix(const SparseFamily& family) {
  const Grid& grid = *family.grid;
  const Space& space = grid.space();
  const auto n = static_cast<Eigen::Index>(space.size());
  Matrix a = Matrix::Zero(n, n);
  for (const auto c : family.cubes) {
    const Cube& q = grid.cube(c);
    for (const auto x : q.members) {
      for (const auto y : q.members) {
        a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += space.mu(y) / q.mass;
      }
    }
  }
  return a;
}

std::vector<double> sparse_apply_local(const SparseFamily& family, std::span<const double> f,
                                       std::size_t cube) {
  const Grid& grid = *family.grid;
  require_size(grid.space(), f);
  const auto avg = grid.averages(f);
  std::vector<double> out(f.size(), 0.0);
  for (const auto c : family.cubes) {
    if (!grid.contains(cube, c)) continue;
    for (const auto x : grid.cube(c).members) out[x] += avg[c];
  }
  return out;
}

KernelCertification certify_kernel(const Matrix& kernel, const Space& space, double cap) {
  const std::size_t n = space.size();
  if (static_cast<std::size_t>(kernel.rows()) != n || static_cast<std::size_t>(kernel.cols()) != n) {
    throw Error(Errc::invalid_argument, "kernel size does not match space");
  }
  const auto K = [&](std::size_t a, std::size_t b) {
    return kernel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  // ball(x0, rho(x0, y)) for every ordered pair
  Matrix ball(n, n);
  KernelCertification cert;
  cert.cap = cap;
  for (std::size_t x0 = 0; x0 < n; ++x0) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x0 == y) continue;
      const double m = space.ball_mass(x0, space.rho(x0, y));
      ball(static_cast<Eigen::Index>(x0), static_cast<Eigen::Index>(y)) = m;
      cert.c_decay = std::max(cert.c_decay, std::abs(K(x0, y)) * m);
    }
  }
  if (!std::isfinite(cert.c_decay)) throw Error(Errc::decay_unbounded, "kernel has non-finite entries");

  const double floor = std::ldexp(1.0, -20);
  for (double eta = 0.5; eta >= floor; eta *= 0.5) {
    double worst = 0.0;
    for (std::size_t x0 = 0; x0 < n; ++x0) {
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x0) continue;
        const double dy = space.rho(x0, y);
        const double m = ball(static_cast<Eigen::Index>(x0), static_cast<Eigen::Index>(y));
        for (std::size_t x = 0; x < n; ++x) {
          if (x == x0) continue;
          const double dx = space.rho(x0, x);
          if (dx > eta * dy * (1.0 + kRelTol)) continue;
          const double scale = std::pow(dx / dy, eta) / m;
          const double first = std::abs(K(x, y) - K(x0, y));
          const double second = std::abs(K(y, x) - K(y, x0));
          worst = std::max(worst, std::max(first, second) / scale);
        }
      }
    }
    cert.ladder.push_back({eta, worst});
    cert.eta = eta;
    cert.c_smooth = worst;
    cert.eta_admissible_threshold = eta;
    if (worst <= cap) {
      cert.within_cap = true;
      break;
    }
  }
  return cert;
}

Matrix graded_sign_kernel(const Space& space) {
  const std::size_t n = space.size();
  Matrix k = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double sign = x > y ? 1.0 : -1.0;
      k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          sign / space.ball_mass(x, space.rho(x, y));
    }
  }
  return k;
}

Matrix kernel_action(const Matrix& kernel, const Space& space) {
  const auto mu = space.mu();
  Eigen::Map<const Eigen::VectorXd> m(mu.data(), static_cast<Eigen::Index>(mu.size()));
  return kernel * m.asDiagonal();
}

std::vector<double> kernel_apply(const Matrix& kernel, const Space& space,
                                 std::span<const double> f) {
  require_size(space, f);
  const std::size_t n = space.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      sum += kernel(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) * f[y] *
             space.mu(y);
    }
    out[x] = sum;
  }
  return out;
}

Matrix commutator_kernel(const Matrix& kernel, std::span<const double> b, int k) {
  if (k < 0) throw Error(Errc::k_negative, "commutator order must be >= 0");
  const auto n = kernel.rows();
  if (static_cast<std::size_t>(n) != b.size()) {
    throw Error(Errc::invalid_argument, "symbol length does not match kernel");
  }
  Matrix out = kernel;
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      const double d = b[static_cast<std::size_t>(x)] - b[static_cast<std::size_t>(y)];
      double factor = 1.0;
      for (int i = 0; i < k; ++i) factor *= d;
      out(x, y) *= factor;
    }
  }
  return out;
}

std::vector<double> commutator_apply(const Matrix& kernel, const Space& space,
                                     std::span<const double> b, int k,
                                     std::span<const double> f) {
  return kernel_apply(commutator_kernel(kernel, b, k), space, f);
}

std::vector<double> conjugated_apply(const Matrix& kernel, const Space& space,
                                     std::span<const double> b, double z,
                                     std::span<const double> f) {
  require_size(space, f);
  require_size(space, b);
  const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
  if (std::abs(z) * (*hi - *lo) > 700.0) {
    throw Error(Errc::overflow, "|z| times the range of b exceeds 700");
  }
  std::vector<double> g(f.size());
  for (std::size_t y = 0; y < f.size(); ++y) g[y] = std::exp(-z * b[y]) * f[y];
  auto out = kernel_apply(kernel, space, g);
  for (std::size_t x = 0; x < out.size(); ++x) out[x] *= std::exp(z * b[x]);
  return out;
}

DominationReport lerner_domination_check(const Matrix& kernel, const Grid& grid, double p,
                                         std::span<const double> w, std::size_t trials,
                                         std::uint64_t seed) {
  const Space& space = grid.space();
  require_size(space, w);
  DominationReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, t);
    const auto f = normal_values(space.size(), rng);
    const auto abs_f = abs_values(f);
    const double top = lp_norm(space, kernel_apply(kernel, space, f), p, w);
    std::vector<SparseFamily> families;
    families.push_back(extract_sparse(grid, selection::CzStack{abs_f}));
    families.push_back(extract_sparse(grid, selection::AllLevels{}));
    for (std::uint64_t j = 0; j < 4; ++j) {
      families.push_back(extract_sparse(grid, selection::Random{0.5, derive_seed(seed, t * 8 + j)}));
    }
    double bottom = 0.0;
    for (const auto& family : families) {
      bottom = std::max(bottom, lp_norm(space, sparse_apply(family, abs_f), p, w));
    }
    const double ratio = top == 0.0 ? 0.0 : top / bottom;
    report.ratios.push_back(ratio);
    report.constant = std::max(report.constant, ratio);
  }
  return report;
}

std::vector<std::size_t> dilated_cube(const Grid& grid, std::size_t cube) {
  const Cube& q = grid.cube(cube);
  const Space& space = grid.space();
  const double radius = 2.0 * space.kappa() * grid.c_sandwich() * grid.scale(q.level);
  return space.ball(q.center, radius).members;
}

AtomSides offsupport_sides(const Matrix& kernel, const Grid& grid, std::size_t cube,
                           std::span<const double> atom, std::span<const double> w) {
  const Space& space = grid.space();
  require_size(space, atom);
  require_size(space, w);
  const Cube& q = grid.cube(cube);
  double total = 0.0;
  double mass = 0.0;
  for (std::size_t x = 0; x < atom.size(); ++x) {
    if (atom[x] != 0.0 && !std::binary_search(q.members.begin(), q.members.end(), x)) {
      throw Error(Errc::invalid_argument, "atom is not supported in the cube");
    }
    total += atom[x] * space.mu(x);
    mass += std::abs(atom[x]) * space.mu(x);
  }
  if (std::abs(total) > 1e-12 * mass) {
    throw Error(Errc::atom_not_mean_zero, "atom integral is " + std::to_string(total));
  }
  const auto ta = kernel_apply(kernel, space, atom);
  std::vector<char> inside(space.size(), 0);
  for (const auto x : dilated_cube(grid, cube)) inside[x] = 1;
  AtomSides sides;
  for (std::size_t x = 0; x < space.size(); ++x) {
    if (!inside[x]) sides.off_support += std::abs(ta[x]) * w[x] * space.mu(x);
  }
  const auto mw = maximal(grid, w);
  for (std::size_t x = 0; x < space.size(); ++x) {
    sides.maximal_side += std::abs(atom[x]) * mw[x] * space.mu(x);
  }
  return sides;
}

OffSupportReport offsupport_bound_check(const Matrix& kernel, const Grid& grid,
                                        std::size_t trials, std::uint64_t seed) {
  const Space& space = grid.space();
  std::vector<std::size_t> cubes;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.cube(i).members.size() >= 2) cubes.push_back(i);
  }
  OffSupportReport report;
  report.trials = trials;
  if (cubes.empty()) return report;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, t);
    std::uniform_int_distribution<std::size_t> pick(0, cubes.size() - 1);
    const std::size_t c = cubes[pick(rng)];
    const Cube& q = grid.cube(c);
    std::vector<double> atom(space.size(), 0.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    double total = 0.0;
    for (const auto x : q.members) {
      atom[x] = normal(rng);
      total += atom[x] * space.mu(x);
    }
    const double mean = total / q.mass;
    for (const auto x : q.members) atom[x] -= mean;
    // Remove the rounding residue on the heaviest member.
    double residue = 0.0;
    for (const auto x : q.members) residue += atom[x] * space.mu(x);
    const std::size_t heavy = *std::max_element(q.members.begin(), q.members.end(),
                                                [&](std::size_t a, std::size_t b) {
                                                  return space.mu(a) < space.mu(b);
                                                });
    atom[heavy] -= residue / space.mu(heavy);
    const auto w = lognormal_values(space.size(), 1.0, rng);
    const auto sides = offsupport_sides(kernel, grid, c, atom, w);
    if (sides.maximal_side > 0.0) {
      ++report.nontrivial;
      report.constant = std::max(report.constant, sides.off_support / sides.maximal_side);
    }
  }
  return report;
}

LocalizationReport maximal_localization_check(const Grid& grid, std::span<const double> w,
                                              double r, std::size_t trials,
                                              std::uint64_t seed) {
  const Space& space = grid.space();
  require_size(space, w);
  LocalizationReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, t);
    const auto f = lognormal_values(space.size(), 1.5, rng);
    const double mean = space.integrate(f) / space.total_mass();
    std::uniform_real_distribution<double> exponent(0.0, 3.0);
    const double lambda = mean * std::exp2(exponent(rng));
    const auto family = cz_decompose(grid, f, lambda);
    std::vector<char> covered(space.size(), 0);
    for (const auto c : family) {
      for (const auto x : dilated_cube(grid, c)) covered[x] = 1;
    }
    std::vector<double> u(space.size());
    for (std::size_t x = 0; x < u.size(); ++x) u[x] = covered[x] ? 0.0 : w[x];
    const auto mu_r = maximal_r(grid, u, r);
    for (const auto c : family) {
      double hi = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      for (const auto x : grid.cube(c).members) {
        hi = std::max(hi, mu_r[x]);
        lo = std::min(lo, mu_r[x]);
      }
      double ratio = 1.0;
      if (hi > 0.0) ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
      report.constant = std::max(report.constant, ratio);
      ++report.cubes_checked;
    }
  }
  return report;
}

}  // namespace sht
