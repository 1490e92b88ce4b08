#include "sht/bmo.hpp"

#include <cmath>
#include <limits>

#include "sht/error.hpp"

namespace sht {

namespace {

void require_size(const Grid& grid, std::span<const double> b) {
  if (b.size() != grid.space().size()) {
    throw Error(Errc::invalid_argument, "function length does not match space");
  }
}

// avg_Q |b - b_Q| for every cube.
std::vector<double> oscillations(const Grid& grid, std::span<const double> b,
                                 const std::vector<double>& means) {
  const Space& space = grid.space();
  std::vector<double> osc(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    double sum = 0.0;
    for (const auto x : q.members) sum += std::abs(b[x] - means[i]) * space.mu(x);
    osc[i] = sum / q.mass;
  }
  return osc;
}

}  // namespace

double cube_mean(const Grid& grid, std::span<const double> b, std::size_t cube) {
  require_size(grid, b);
  const Cube& q = grid.cube(cube);
  double sum = 0.0;
  for (const auto x : q.members) sum += b[x] * grid.space().mu(x);
  return sum / q.mass;
}

double bmo_norm(const Grid& grid, std::span<const double> b) {
  require_size(grid, b);
  const auto means = grid.averages(b);
  double norm = 0.0;
  for (const double o : oscillations(grid, b, means)) norm = std::max(norm, o);
  return norm;
}

ParentJumpReport parent_jump_check(const Grid& grid, std::span<const double> b) {
  require_size(grid, b);
  const auto means = grid.averages(b);
  const double norm = bmo_norm(grid, b);
  const double allowed = norm / grid.epsilon();
  ParentJumpReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto parent = grid.cube(i).parent;
    if (!parent) continue;
    const double jump = std::abs(means[i] - means[*parent]);
    const double ratio = allowed > 0.0 ? jump / allowed : (jump > 0.0 ? INFINITY : 0.0);
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_cube = i;
    }
  }
  report.passed = report.worst_ratio <= 1.0 + 1e-12;
  return report;
}

double jn_alpha(const Grid& grid) { return grid.epsilon() / 3.0 * std::log(2.0); }

JohnNirenbergReport jn_check(const Grid& grid, std::span<const double> b,
                             std::optional<double> alpha) {
  require_size(grid, b);
  const double eps = grid.epsilon();
  JohnNirenbergReport report;
  report.alpha = alpha.value_or(jn_alpha(grid));
  report.threshold = eps * std::log(2.0) / (2.0 * eps + 1.0);
  const double denom = 1.0 - 0.5 * std::exp((1.0 / eps + 2.0) * report.alpha);
  report.bound = denom > 0.0 ? std::exp(2.0 * report.alpha) / denom
                             : std::numeric_limits<double>::infinity();
  report.norm = bmo_norm(grid, b);
  if (report.norm == 0.0) return report;

  const Space& space = grid.space();
  const auto means = grid.averages(b);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    double sum = 0.0;
    for (const auto x : q.members) {
      sum += std::exp(report.alpha * std::abs(b[x] - means[i]) / report.norm) * space.mu(x);
    }
    const double avg = sum / q.mass;
    if (avg > report.sup) {
      report.sup = avg;
      report.worst_cube = i;
    }
  }
  report.passed = std::isfinite(report.sup) && report.sup <= report.bound * (1.0 + 1e-9);
  return report;
}

}  // namespace sht
