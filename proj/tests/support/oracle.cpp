#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

namespace oracle {

std::vector<Members> cubes_of(const sht::Grid& grid) {
  std::vector<Members> out;
  for (const auto& c : grid.cubes()) out.push_back(c.members);
  return out;
}

bool has_point(const Members& cube, std::size_t x) {
  return std::find(cube.begin(), cube.end(), x) != cube.end();
}

bool contains(const Members& outer, const Members& inner) {
  for (const auto x : inner) {
    if (!has_point(outer, x)) return false;
  }
  return true;
}

double mass(const sht::Space& space, const Members& set) {
  double m = 0.0;
  for (const auto x : set) m += space.mu(x);
  return m;
}

double average(const sht::Space& space, const Members& set, std::span<const double> f) {
  double s = 0.0;
  for (const auto x : set) s += f[x] * space.mu(x);
  return s / mass(space, set);
}

std::vector<double> maximal(const sht::Space& space, const std::vector<Members>& cubes,
                            std::span<const double> f) {
  std::vector<double> af(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) af[x] = std::abs(f[x]);
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t x = 0; x < f.size(); ++x) {
    for (const auto& q : cubes) {
      if (has_point(q, x)) out[x] = std::max(out[x], average(space, q, af));
    }
  }
  return out;
}

double ap(const sht::Space& space, const std::vector<Members>& cubes, std::span<const double> w,
          double p) {
  double best = 0.0;
  for (const auto& q : cubes) {
    double sw = 0.0;
    double ss = 0.0;
    for (const auto x : q) {
      sw += w[x] * space.mu(x);
      ss += std::pow(w[x], -1.0 / (p - 1.0)) * space.mu(x);
    }
    const double m = mass(space, q);
    best = std::max(best, (sw / m) * std::pow(ss / m, p - 1.0));
  }
  return best;
}

double a1(const sht::Space& space, const std::vector<Members>& cubes, std::span<const double> w) {
  const auto mw = maximal(space, cubes, w);
  double best = 0.0;
  for (std::size_t x = 0; x < w.size(); ++x) best = std::max(best, mw[x] / w[x]);
  return best;
}

double fujii_wilson(const sht::Space& space, const std::vector<Members>& cubes,
                    std::span<const double> w) {
  double best = 0.0;
  for (const auto& q : cubes) {
    double integral = 0.0;
    double wq = 0.0;
    for (const auto x : q) {
      double m = 0.0;
      for (const auto& r : cubes) {
        if (has_point(r, x) && contains(q, r)) m = std::max(m, average(space, r, w));
      }
      integral += m * space.mu(x);
      wq += w[x] * space.mu(x);
    }
    best = std::max(best, integral / wq);
  }
  return best;
}

double hruscev(const sht::Space& space, const std::vector<Members>& cubes,
               std::span<const double> w) {
  double best = 0.0;
  for (const auto& q : cubes) {
    double lg = 0.0;
    for (const auto x : q) lg += -std::log(w[x]) * space.mu(x);
    best = std::max(best, average(space, q, w) * std::exp(lg / mass(space, q)));
  }
  return best;
}

double bmo(const sht::Space& space, const std::vector<Members>& cubes, std::span<const double> b) {
  double best = 0.0;
  for (const auto& q : cubes) {
    const double m = average(space, q, b);
    double osc = 0.0;
    for (const auto x : q) osc += std::abs(b[x] - m) * space.mu(x);
    best = std::max(best, osc / mass(space, q));
  }
  return best;
}

std::vector<double> sparse_apply(const sht::Space& space, const std::vector<Members>& cubes,
                                 std::span<const std::size_t> family, std::span<const double> f) {
  std::vector<double> out(f.size(), 0.0);
  for (const auto c : family) {
    const double a = average(space, cubes[c], f);
    for (const auto x : cubes[c]) out[x] += a;
  }
  return out;
}

double sparse_ratio(const sht::Space& space, const std::vector<Members>& cubes,
                    std::span<const std::size_t> family) {
  double worst = 0.0;
  for (const auto q : family) {
    std::vector<bool> covered(space.size(), false);
    for (const auto r : family) {
      // An equal member set further down the list is a finer copy of q.
      if (r == q || !contains(cubes[q], cubes[r])) continue;
      if (cubes[r].size() == cubes[q].size() && r < q) continue;
      for (const auto x : cubes[r]) covered[x] = true;
    }
    double m = 0.0;
    for (std::size_t x = 0; x < covered.size(); ++x) {
      if (covered[x]) m += space.mu(x);
    }
    worst = std::max(worst, m / mass(space, cubes[q]));
  }
  return worst;
}

std::vector<std::size_t> cz(const sht::Space& space, const std::vector<Members>& cubes,
                            std::span<const double> f, double lambda) {
  std::vector<double> af(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) af[x] = std::abs(f[x]);
  std::vector<std::size_t> above;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (average(space, cubes[i], af) > lambda) above.push_back(i);
  }
  // A cube is kept when no strictly larger cube above lambda contains it.
  // Equal member sets (a cube repeated across levels) keep only the
  // coarsest copy, which is the first in top-down order.
  std::vector<std::size_t> out;
  for (const auto i : above) {
    bool maximal_cube = true;
    for (const auto j : above) {
      if (j == i || !contains(cubes[j], cubes[i])) continue;
      if (cubes[j].size() > cubes[i].size() || j < i) {
        maximal_cube = false;
        break;
      }
    }
    if (maximal_cube) out.push_back(i);
  }
  return out;
}

double kappa(const sht::Matrix& rho) {
  const auto n = rho.rows();
  double k = 1.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      for (Eigen::Index z = 0; z < n; ++z) {
        const double s = rho(x, y) + rho(y, z);
        if (s > 0.0) k = std::max(k, rho(x, z) / s);
      }
    }
  }
  return k;
}

double doubling(const sht::Space& space) {
  const std::size_t n = space.size();
  const auto ball = [&](std::size_t x, double r) {
    double m = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (space.rho(x, y) < r) m += space.mu(y);
    }
    return m;
  };
  std::vector<double> radii;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double d = space.rho(x, y);
      if (d > 0.0) {
        radii.push_back(d);
        radii.push_back(d / 2.0);
      }
    }
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  const std::size_t count = radii.size();
  for (std::size_t i = 0; i + 1 < count; ++i) radii.push_back(0.5 * (radii[i] + radii[i + 1]));
  if (!radii.empty()) radii.push_back(2.0 * radii[count - 1]);
  double best = 1.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (const double r : radii) {
      const double inner = ball(x, r);
      if (inner > 0.0) best = std::max(best, ball(x, 2.0 * r) / inner);
    }
  }
  return best;
}

double norm2(const sht::Matrix& action, const sht::Space& space, std::span<const double> w,
             std::span<const double> v) {
  const auto n = action.rows();
  sht::Matrix b(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      const auto i = static_cast<std::size_t>(x);
      const auto j = static_cast<std::size_t>(y);
      b(x, y) = std::sqrt(w[i] * space.mu(i)) * action(x, y) / std::sqrt(v[j] * space.mu(j));
    }
  }
  Eigen::JacobiSVD<sht::Matrix> svd(b);
  return svd.singularValues()(0);
}

double maximal_norm2(const sht::Space& space, const std::vector<Members>& cubes,
                     std::span<const double> w) {
  const std::size_t n = space.size();
  std::vector<std::vector<std::size_t>> choices(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      if (has_point(cubes[i], x)) choices[x].push_back(i);
    }
  }
  std::vector<std::size_t> pick(n, 0);
  double best = 0.0;
  const auto nn = static_cast<Eigen::Index>(n);
  while (true) {
    sht::Matrix a = sht::Matrix::Zero(nn, nn);
    for (std::size_t x = 0; x < n; ++x) {
      const auto& q = cubes[choices[x][pick[x]]];
      const double m = mass(space, q);
      for (const auto y : q) a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = space.mu(y) / m;
    }
    best = std::max(best, norm2(a, space, w, w));
    std::size_t i = 0;
    while (i < n && ++pick[i] == choices[i].size()) pick[i++] = 0;
    if (i == n) break;
  }
  return best;
}

namespace {

double open_ball_mass(const sht::Space& space, std::size_t x, double r) {
  double m = 0.0;
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (space.rho(x, y) < r) m += space.mu(y);
  }
  return m;
}

}  // namespace

double kernel_decay(const sht::Matrix& kernel, const sht::Space& space) {
  double best = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (std::size_t y = 0; y < space.size(); ++y) {
      if (x == y) continue;
      const double k = kernel(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      best = std::max(best, std::abs(k) * open_ball_mass(space, x, space.rho(x, y)));
    }
  }
  return best;
}

double kernel_smoothness(const sht::Matrix& kernel, const sht::Space& space, double eta) {
  const auto k = [&](std::size_t a, std::size_t b) {
    return kernel(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  double best = 0.0;
  for (std::size_t x0 = 0; x0 < space.size(); ++x0) {
    for (std::size_t y = 0; y < space.size(); ++y) {
      if (y == x0) continue;
      const double far = space.rho(x0, y);
      for (std::size_t x = 0; x < space.size(); ++x) {
        const double near = space.rho(x0, x);
        if (x == x0 || near > eta * far * (1.0 + 1e-12)) continue;
        const double allowed = std::pow(near / far, eta) / open_ball_mass(space, x0, far);
        best = std::max(best, std::abs(k(x, y) - k(x0, y)) / allowed);
        best = std::max(best, std::abs(k(y, x) - k(y, x0)) / allowed);
      }
    }
  }
  return best;
}

double lp(const sht::Space& space, std::span<const double> f, double p, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s += std::pow(std::abs(f[x]), p) * w[x] * space.mu(x);
  return std::pow(s, 1.0 / p);
}

bool close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace oracle
