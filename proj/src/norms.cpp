#include "sht/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sht/error.hpp"
#include "sht/operators.hpp"
#include "sht/random.hpp"

namespace sht {

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::exact: return "EXACT";
    case NormKind::lower_bound: return "LOWER_BOUND";
    case NormKind::upper_bound: return "UPPER_BOUND";
  }
  return "UNKNOWN";
}

std::string_view to_string(NormMethod method) {
  switch (method) {
    case NormMethod::power_iteration: return "POWER_ITERATION";
    case NormMethod::exhaustive: return "EXHAUSTIVE";
    case NormMethod::monte_carlo: return "MONTE_CARLO";
  }
  return "UNKNOWN";
}

double lp_norm(const Space& space, std::span<const double> f, double p,
               std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    sum += std::pow(std::abs(f[x]), p) * w[x] * space.mu(x);
  }
  return std::pow(sum, 1.0 / p);
}

namespace {

using Vector = Eigen::VectorXd;

void check_inputs(const Space& space, double p, std::span<const double> w,
                  std::span<const double> v) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(Errc::p_invalid, "p must lie in (1, inf)");
  if (w.size() != space.size() || v.size() != space.size()) {
    throw Error(Errc::invalid_argument, "weight length does not match space");
  }
}

struct TopEigen {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  bool converged = false;
};

// Largest eigenvalue of a symmetric positive semidefinite matrix. Repeated
// squaring separates the top eigenvalue quickly; plain power steps polish.
TopEigen top_eigen(const Matrix& g, std::uint64_t seed) {
  TopEigen out;
  const auto n = g.rows();
  const double scale = g.norm();
  if (scale == 0.0) {
    out.vector = Vector::Zero(n);
    if (n > 0) out.vector(0) = 1.0;
    out.converged = true;
    return out;
  }
  Rng rng = make_rng(seed, 0x5eed);
  const auto start = normal_values(static_cast<std::size_t>(n), rng);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.25 * start[static_cast<std::size_t>(i)];
  x.normalize();
  double prev = x.dot(g * x);
  Matrix h = g / scale;
  int stable = 0;
  for (int s = 0; s < 64; ++s) {
    h = h * h;
    h = 0.5 * (h + h.transpose()).eval();
    const double hn = h.norm();
    if (hn == 0.0 || !std::isfinite(hn)) break;
    h /= hn;
    Vector y = h * x;
    if (y.norm() == 0.0) break;
    y.normalize();
    const double lambda = y.dot(g * y);
    ++out.iterations;
    x = y;
    if (std::abs(lambda - prev) <= 1e-15 * std::abs(lambda)) {
      if (++stable >= 2) break;
    } else {
      stable = 0;
    }
    prev = lambda;
  }
  double lambda = x.dot(g * x);
  for (int i = 0; i < 200; ++i) {
    Vector y = g * x;
    const double yn = y.norm();
    if (yn == 0.0) break;
    y /= yn;
    const double next = y.dot(g * y);
    ++out.iterations;
    const bool done = std::abs(next - lambda) <= 1e-14 * std::abs(next);
    if (next >= lambda) {
      x = y;
      lambda = next;
    }
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.value = lambda;
  out.vector = x;
  return out;
}

double lp_vec(const Vector& x, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)), p);
  return std::pow(s, 1.0 / p);
}

Vector dual_map(const Vector& y, double p) {
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y(i));
    out(i) = a == 0.0 ? 0.0 : std::copysign(std::pow(a, p - 1.0), y(i));
  }
  return out;
}

// Boyd's power method for ||B||_{l^p -> l^p} from one start; returns the
// best ratio seen and writes the best vector back to x.
double boyd_ascent(const Matrix& b, double p, Vector& x, int max_iterations, int& iterations) {
  const double q = p / (p - 1.0);
  double nx = lp_vec(x, p);
  if (nx == 0.0) return 0.0;
  x /= nx;
  double best = lp_vec(b * x, p);
  Vector best_x = x;
  for (int it = 0; it < max_iterations; ++it) {
    ++iterations;
    const Vector y = b * x;
    const Vector z = b.transpose() * dual_map(y, p);
    Vector next = dual_map(z, q);
    const double nn = lp_vec(next, p);
    if (nn == 0.0 || !std::isfinite(nn)) break;
    next /= nn;
    const double value = lp_vec(b * next, p);
    x = next;
    if (value > best) {
      const bool small = value - best <= 1e-13 * value;
      best = value;
      best_x = next;
      if (small) break;
    } else {
      break;
    }
  }
  x = best_x;
  return best;
}

Matrix conjugate(const Matrix& action, const Space& space, double p, std::span<const double> w,
                 std::span<const double> v) {
  Matrix b = action;
  const auto n = action.rows();
  for (Eigen::Index x = 0; x < n; ++x) {
    const double left = std::pow(w[static_cast<std::size_t>(x)] * space.mu(static_cast<std::size_t>(x)), 1.0 / p);
    b.row(x) *= left;
  }
  for (Eigen::Index y = 0; y < n; ++y) {
    const double right = std::pow(v[static_cast<std::size_t>(y)] * space.mu(static_cast<std::size_t>(y)), -1.0 / p);
    b.col(y) *= right;
  }
  return b;
}

}  // namespace

NormEstimate weighted_norm(const Matrix& action, const Space& space, double p,
                           std::span<const double> w, std::span<const double> v,
                           const NormOptions& options) {
  check_inputs(space, p, w, v);
  const auto n = static_cast<Eigen::Index>(space.size());
  if (action.rows() != n || action.cols() != n) {
    throw Error(Errc::invalid_argument, "operator size does not match space");
  }
  const Matrix b = conjugate(action, space, p, w, v);
  NormEstimate est;
  est.seed = options.seed;

  // p = 2 singular vector; also the warm start for other p.
  const Matrix gram = b.transpose() * b;
  const TopEigen top = top_eigen(gram, options.seed);

  const auto to_original = [&](const Vector& x) {
    std::vector<double> f(static_cast<std::size_t>(n));
    for (Eigen::Index y = 0; y < n; ++y) {
      const auto i = static_cast<std::size_t>(y);
      f[i] = x(y) * std::pow(v[i] * space.mu(i), -1.0 / p);
    }
    return f;
  };

  if (p == 2.0) {
    est.value = std::sqrt(std::max(0.0, top.value));
    est.kind = top.converged ? NormKind::exact : NormKind::lower_bound;
    est.method = NormMethod::power_iteration;
    est.iterations = top.iterations;
    est.argmax = to_original(top.vector);
    if (n <= 6) {
      Eigen::JacobiSVD<Matrix> svd(b);
      est.cross_check = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    }
    return est;
  }

  est.kind = NormKind::lower_bound;
  est.method = NormMethod::monte_carlo;
  std::vector<Vector> starts;
  for (const auto& f : options.warm_starts) {
    Vector x(n);
    for (Eigen::Index y = 0; y < n; ++y) {
      const auto i = static_cast<std::size_t>(y);
      x(y) = f[i] * std::pow(v[i] * space.mu(i), 1.0 / p);
    }
    starts.push_back(std::move(x));
  }
  starts.push_back(top.vector);
  Rng rng = make_rng(options.seed, 1);
  const auto trials = static_cast<std::size_t>(std::max(options.trials, 1));
  const std::size_t masses = std::min<std::size_t>(trials / 2, static_cast<std::size_t>(n));
  std::vector<std::size_t> points(static_cast<std::size_t>(n));
  std::iota(points.begin(), points.end(), std::size_t{0});
  std::shuffle(points.begin(), points.end(), rng);
  for (std::size_t i = 0; i < masses; ++i) {
    Vector x = Vector::Zero(n);
    x(static_cast<Eigen::Index>(points[i])) = 1.0;
    starts.push_back(std::move(x));
  }
  // One stream per start keeps the start set nested as trials grows.
  for (std::size_t t = 0; starts.size() < trials + options.warm_starts.size() + 1; ++t) {
    Rng start_rng = make_rng(options.seed, 0x10000 + t);
    const auto vals = normal_values(static_cast<std::size_t>(n), start_rng);
    starts.push_back(Eigen::Map<const Vector>(vals.data(), n));
  }
  double best = 0.0;
  Vector best_x = Vector::Zero(n);
  for (auto& x : starts) {
    const double value = boyd_ascent(b, p, x, options.max_iterations, est.iterations);
    if (value > best) {
      best = value;
      best_x = x;
    }
  }
  est.value = best;
  est.argmax = to_original(best_x);
  return est;
}

namespace {

// ||M f||_{L^p(w)} with f normalized in L^p(v), by alternating ascent.
struct MaximalAscent {
  const Grid& grid;
  double p;
  std::span<const double> w;
  std::span<const double> v;

  double value(std::vector<double>& f) const {
    const Space& space = grid.space();
    const double nf = lp_norm(space, f, p, v);
    if (nf == 0.0) return 0.0;
    for (auto& x : f) x /= nf;
    return lp_norm(space, maximal(grid, f), p, w);
  }

  double run(std::vector<double> f, int max_iterations, int& iterations,
             std::vector<double>& best_f) const {
    const Space& space = grid.space();
    const std::size_t n = space.size();
    for (auto& x : f) x = std::abs(x);
    double best = value(f);
    best_f = f;
    for (int it = 0; it < max_iterations; ++it) {
      ++iterations;
      const auto sel = maximal_selection(grid, f);
      const auto mf = maximal(grid, f);
      std::vector<double> h(grid.size(), 0.0);
      for (std::size_t x = 0; x < n; ++x) {
        h[sel[x]] += w[x] * space.mu(x) * std::pow(mf[x], p - 1.0);
      }
      for (std::size_t c = 0; c < grid.size(); ++c) h[c] /= grid.cube(c).mass;
      std::vector<double> next(n, 0.0);
      for (std::size_t y = 0; y < n; ++y) {
        double g = 0.0;
        std::optional<std::size_t> cur = grid.leaf()[y];
        while (cur) {
          g += h[*cur];
          cur = grid.cube(*cur).parent;
        }
        next[y] = std::pow(g / v[y], 1.0 / (p - 1.0));
      }
      const double val = value(next);
      if (!(val > best)) break;
      const bool small = val - best <= 1e-13 * val;
      best = val;
      best_f = next;
      f = std::move(next);
      if (small) break;
    }
    return best;
  }
};

}  // namespace

NormEstimate maximal_norm(const Grid& grid, double p, std::span<const double> w,
                          const NormOptions& options, std::size_t exhaustive_limit) {
  const Space& space = grid.space();
  check_inputs(space, p, w, w);
  const std::size_t n = space.size();
  NormEstimate est;
  est.seed = options.seed;

  // chains[x]: cubes containing x, finest first.
  std::vector<std::vector<std::size_t>> chains(n);
  double selections = 1.0;
  for (std::size_t x = 0; x < n; ++x) {
    std::optional<std::size_t> cur = grid.leaf()[x];
    while (cur) {
      chains[x].push_back(*cur);
      cur = grid.cube(*cur).parent;
    }
    selections *= static_cast<double>(chains[x].size());
  }

  if (selections <= static_cast<double>(exhaustive_limit)) {
    est.method = NormMethod::exhaustive;
    est.kind = p == 2.0 ? NormKind::exact : NormKind::lower_bound;
    std::vector<std::size_t> pick(n, 0);
    const auto nn = static_cast<Eigen::Index>(n);
    NormOptions inner = options;
    inner.trials = std::min(options.trials, 8);
    while (true) {
      Matrix a = Matrix::Zero(nn, nn);
      for (std::size_t x = 0; x < n; ++x) {
        const Cube& q = grid.cube(chains[x][pick[x]]);
        for (const auto y : q.members) {
          a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = space.mu(y) / q.mass;
        }
      }
      auto sub = weighted_norm(a, space, p, w, inner);
      est.iterations += sub.iterations;
      if (sub.kind != NormKind::exact) est.kind = NormKind::lower_bound;
      if (sub.value > est.value) {
        est.value = sub.value;
        est.argmax = std::move(sub.argmax);
      }
      std::size_t i = 0;
      while (i < n && ++pick[i] == chains[i].size()) pick[i++] = 0;
      if (i == n) break;
    }
    return est;
  }

  est.kind = NormKind::lower_bound;
  est.method = NormMethod::monte_carlo;
  const MaximalAscent ascent{grid, p, w, w};
  std::vector<std::vector<double>> starts = options.warm_starts;
  starts.emplace_back(n, 1.0);
  // sigma chi_Q for every cube: the classical extremals for power weights.
  const double q = p / (p - 1.0);
  std::vector<std::size_t> cube_order(grid.size());
  std::iota(cube_order.begin(), cube_order.end(), std::size_t{0});
  Rng rng = make_rng(options.seed, 2);
  const auto trials = static_cast<std::size_t>(std::max(options.trials, 1));
  std::shuffle(cube_order.begin(), cube_order.end(), rng);
  if (cube_order.size() > 4 * trials) cube_order.resize(4 * trials);
  for (const auto c : cube_order) {
    std::vector<double> f(n, 0.0);
    for (const auto x : grid.cube(c).members) f[x] = std::pow(w[x], 1.0 - q);
    starts.push_back(std::move(f));
  }
  for (std::size_t t = 0; t < trials; ++t) {
    Rng start_rng = make_rng(options.seed, 0x20000 + t);
    starts.push_back(lognormal_values(n, 1.0, start_rng));
  }
  std::vector<double> best_f;
  for (const auto& s : starts) {
    std::vector<double> f_out;
    const double val = ascent.run(s, options.max_iterations, est.iterations, f_out);
    if (val > est.value) {
      est.value = val;
      best_f = std::move(f_out);
    }
  }
  est.argmax = std::move(best_f);
  return est;
}

double weak_quasinorm(const Space& space, std::span<const double> g, std::span<const double> w) {
  const std::size_t n = g.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(g[a]) > std::abs(g[b]); });
  double best = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mass += w[order[i]] * space.mu(order[i]);
    const double t = std::abs(g[order[i]]);
    const bool last_of_tie = i + 1 == n || std::abs(g[order[i + 1]]) != t;
    if (last_of_tie) best = std::max(best, t * mass);
  }
  return best;
}

std::vector<std::vector<double>> candidate_functions(const Grid& grid, std::size_t count,
                                                     std::uint64_t seed) {
  const Space& space = grid.space();
  const std::size_t n = space.size();
  std::vector<std::vector<double>> out;
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<double> f(n, 0.0);
    f[x] = 1.0 / space.mu(x);
    out.push_back(std::move(f));
  }
  for (std::size_t t = 0; t < count; ++t) {
    Rng rng = make_rng(seed, t);
    switch (t % 4) {
      case 0: {
        auto f = lognormal_values(n, 1.5, rng);
        const double mean = space.integrate(f) / space.total_mass();
        const auto cubes = cz_decompose(grid, f, 2.0 * mean);
        if (cubes.empty()) {
          out.push_back(std::move(f));
          break;
        }
        const auto avg = grid.averages(f);
        std::vector<double> bad(n, 0.0);
        for (const auto c : cubes) {
          for (const auto x : grid.cube(c).members) bad[x] = f[x] - avg[c];
        }
        out.push_back(std::move(bad));
        break;
      }
      case 1:
        out.push_back(lognormal_values(n, 1.0, rng));
        break;
      case 2:
        out.push_back(normal_values(n, rng));
        break;
      default: {
        std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
        std::vector<double> f(n, 0.0);
        for (const auto x : grid.cube(pick(rng)).members) f[x] = 1.0;
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

NormEstimate weak_norm(const Matrix& action, const Grid& grid, std::span<const double> w,
                       std::span<const double> v, const NormOptions& options) {
  const Space& space = grid.space();
  if (w.size() != space.size() || v.size() != space.size()) {
    throw Error(Errc::invalid_argument, "weight length does not match space");
  }
  NormEstimate est;
  est.kind = NormKind::lower_bound;
  est.method = NormMethod::monte_carlo;
  est.seed = options.seed;
  auto candidates = candidate_functions(grid, static_cast<std::size_t>(std::max(options.trials, 0)),
                                        options.seed);
  for (const auto& f : options.warm_starts) candidates.push_back(f);
  const auto n = static_cast<Eigen::Index>(space.size());
  for (const auto& f : candidates) {
    double l1 = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) l1 += std::abs(f[x]) * v[x] * space.mu(x);
    if (l1 == 0.0) continue;
    const Eigen::VectorXd g = action * Eigen::Map<const Eigen::VectorXd>(f.data(), n);
    const double value = weak_quasinorm(space, std::span<const double>(g.data(), g.size()), w) / l1;
    ++est.iterations;
    if (value > est.value) {
      est.value = value;
      est.argmax = f;
    }
  }
  return est;
}

}  // namespace sht
