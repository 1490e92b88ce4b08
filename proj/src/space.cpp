#include "sht/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sht/error.hpp"
#include "sht/random.hpp"

namespace sht {

namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kRelTol * std::max(std::abs(a), std::abs(b));
}

std::string pair_text(Eigen::Index x, Eigen::Index y) {
  std::ostringstream os;
  os << "(" << x << ", " << y << ")";
  return os.str();
}

void validate_distances(const Matrix& rho) {
  if (rho.rows() != rho.cols()) {
    throw Error(Errc::invalid_argument, "distance matrix is not square");
  }
  if (rho.rows() == 0) throw Error(Errc::empty_space, "no points");
  const Eigen::Index n = rho.rows();
  for (Eigen::Index x = 0; x < n; ++x) {
    if (rho(x, x) != 0.0) {
      throw Error(Errc::invalid_argument, "nonzero diagonal at " + pair_text(x, x));
    }
    for (Eigen::Index y = 0; y < n; ++y) {
      const double d = rho(x, y);
      if (!std::isfinite(d)) {
        throw Error(Errc::invalid_argument, "non-finite distance at " + pair_text(x, y));
      }
      if (d < 0.0) throw Error(Errc::negative_distance, "at " + pair_text(x, y));
      if (!nearly_equal(d, rho(y, x))) {
        throw Error(Errc::asymmetric_matrix, "at " + pair_text(x, y));
      }
      if (x != y && d == 0.0) {
        throw Error(Errc::zero_off_diagonal, "distinct points " + pair_text(x, y));
      }
    }
  }
}

}  // namespace

double certify_quasimetric(const Matrix& rho) {
  validate_distances(rho);
  const Eigen::Index n = rho.rows();
  double kappa = 1.0;
  for (Eigen::Index y = 0; y < n; ++y) {
    for (Eigen::Index x = 0; x < n; ++x) {
      const double rxy = rho(x, y);
      for (Eigen::Index z = 0; z < n; ++z) {
        const double denom = rxy + rho(y, z);
        if (denom > 0.0) kappa = std::max(kappa, rho(x, z) / denom);
      }
    }
  }
  return kappa;
}

SpacePtr Space::create(std::vector<std::string> labels, Matrix rho,
                       std::vector<double> mu, std::vector<double> coordinates) {
  const double kappa = certify_quasimetric(rho);
  const std::size_t n = static_cast<std::size_t>(rho.rows());
  if (mu.size() != n) {
    throw Error(Errc::invalid_argument, "mass vector length does not match matrix");
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!(mu[x] > 0.0) || !std::isfinite(mu[x])) {
      throw Error(Errc::invalid_argument, "point mass must be positive at " + std::to_string(x));
    }
  }
  if (labels.empty()) {
    labels.resize(n);
    for (std::size_t x = 0; x < n; ++x) labels[x] = std::to_string(x);
  }
  if (labels.size() != n) {
    throw Error(Errc::invalid_argument, "label count does not match matrix");
  }
  if (!coordinates.empty() && coordinates.size() != n) {
    throw Error(Errc::invalid_argument, "coordinate count does not match matrix");
  }

  std::shared_ptr<Space> space(new Space());
  space->labels_ = std::move(labels);
  space->rho_ = std::move(rho);
  space->mu_ = std::move(mu);
  space->coordinates_ = std::move(coordinates);
  space->kappa_ = kappa;
  space->total_mass_ = std::accumulate(space->mu_.begin(), space->mu_.end(), 0.0);

  space->sorted_dist_.resize(n);
  space->cumulative_mass_.resize(n);
  double diameter = 0.0;
  double min_distance = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(n);
  for (std::size_t x = 0; x < n; ++x) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return space->rho_(x, a) < space->rho_(x, b);
    });
    auto& dist = space->sorted_dist_[x];
    auto& cum = space->cumulative_mass_[x];
    dist.resize(n);
    cum.resize(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = space->rho_(x, order[i]);
      running += space->mu_[order[i]];
      cum[i] = running;
    }
    diameter = std::max(diameter, dist.back());
    if (n > 1) min_distance = std::min(min_distance, dist[1]);
  }
  space->diameter_ = diameter;
  space->min_distance_ = n > 1 ? min_distance : 0.0;
  space->doubling_ = certify_doubling(*space);
  return space;
}

double Space::ball_mass(std::size_t center, double radius) const {
  const auto& dist = sorted_dist_[center];
  const double cutoff = radius * (1.0 - kRelTol);
  const auto it = std::lower_bound(dist.begin(), dist.end(), cutoff);
  const auto count = static_cast<std::size_t>(it - dist.begin());
  return count == 0 ? 0.0 : cumulative_mass_[center][count - 1];
}

Ball Space::ball(std::size_t center, double radius) const {
  Ball b{center, radius, {}};
  for (std::size_t y = 0; y < size(); ++y) {
    if (within_open(rho_(center, y), radius)) b.members.push_back(y);
  }
  return b;
}

double Space::mass(std::span<const std::size_t> members) const {
  double total = 0.0;
  for (const auto x : members) total += mu_[x];
  return total;
}

double Space::integrate(std::span<const double> f) const {
  double total = 0.0;
  for (std::size_t x = 0; x < size(); ++x) total += f[x] * mu_[x];
  return total;
}

double certify_doubling(const Space& space) {
  double worst = 1.0;
  const std::size_t n = space.size();
  for (std::size_t x = 0; x < n; ++x) {
    const auto& dist = space.sorted_dist_[x];
    for (std::size_t i = 1; i < n; ++i) {
      if (dist[i] == dist[i - 1]) continue;
      const double r = dist[i];
      worst = std::max(worst, space.ball_mass(x, 2.0 * r) / space.ball_mass(x, r));
    }
  }
  return worst;
}

SpacePtr build_interval_space(std::size_t n) {
  if (n == 0) throw Error(Errc::empty_space, "interval space needs n >= 1");
  const double dn = static_cast<double>(n);
  Matrix rho(n, n);
  std::vector<double> coords(n);
  for (std::size_t i = 0; i < n; ++i) {
    coords[i] = (static_cast<double>(i) + 0.5) / dn;
    for (std::size_t j = 0; j < n; ++j) {
      const double steps = std::abs(static_cast<double>(i) - static_cast<double>(j));
      rho(i, j) = steps / dn;
    }
  }
  return Space::create({}, std::move(rho), std::vector<double>(n, 1.0 / dn),
                       std::move(coords));
}

SpacePtr build_cantor_space(int level) {
  if (level < 0 || level > 20) {
    throw Error(Errc::invalid_argument, "Cantor level must be in [0, 20]");
  }
  // Work in units of 1/(2 * 3^level) so every midpoint is an integer.
  std::int64_t pow3 = 1;
  for (int i = 0; i < level; ++i) pow3 *= 3;
  const std::size_t count = std::size_t{1} << level;
  std::vector<std::int64_t> mid(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::int64_t left = 0;  // in units of 3^-level
    std::int64_t step = pow3;
    for (int bit = level - 1; bit >= 0; --bit) {
      step /= 3;
      if ((k >> bit) & 1U) left += 2 * step;
    }
    mid[k] = 2 * left + 1;
  }
  const double unit = 1.0 / (2.0 * static_cast<double>(pow3));
  Matrix rho(count, count);
  std::vector<double> coords(count);
  for (std::size_t i = 0; i < count; ++i) {
    coords[i] = static_cast<double>(mid[i]) * unit;
    for (std::size_t j = 0; j < count; ++j) {
      rho(i, j) = static_cast<double>(std::abs(mid[i] - mid[j])) * unit;
    }
  }
  const double mass = 1.0 / static_cast<double>(count);
  return Space::create({}, std::move(rho), std::vector<double>(count, mass),
                       std::move(coords));
}

SpacePtr build_snowflake_space(const Space& base, double s) {
  if (!(s > 0.0)) throw Error(Errc::invalid_argument, "snowflake exponent must be positive");
  Matrix rho = base.rho().array().pow(s).matrix();
  std::vector<double> coords(base.coordinates().begin(), base.coordinates().end());
  return Space::create(base.labels(), std::move(rho),
                       std::vector<double>(base.mu().begin(), base.mu().end()),
                       std::move(coords));
}

SpacePtr build_random_graph_space(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(Errc::empty_space, "graph space needs n >= 1");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> length(0.5, 2.0);
  std::uniform_int_distribution<std::size_t> vertex(0, n - 1);
  const double inf = std::numeric_limits<double>::infinity();
  Matrix d = Matrix::Constant(n, n, inf);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
  auto connect = [&](std::size_t a, std::size_t b, double len) {
    if (a == b) return;
    d(a, b) = d(b, a) = std::min(d(a, b), len);
  };
  for (std::size_t i = 0; i + 1 < n; ++i) connect(i, i + 1, length(rng));
  if (n > 2) connect(n - 1, 0, length(rng));
  for (std::size_t c = 0; c < n; ++c) connect(vertex(rng), vertex(rng), length(rng));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    }
  }
  // Floyd-Warshall sums in different orders; force exact symmetry.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d(j, i) = d(i, j);
  }
  auto mu = uniform_values(n, 0.5, 2.0, rng);
  return Space::create({}, std::move(d), std::move(mu));
}

}  // namespace sht
