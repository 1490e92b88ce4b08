#include "sht/dyadic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "sht/error.hpp"
#include "sht/random.hpp"

namespace sht {

namespace {

std::atomic<std::uint64_t> next_grid_id{1};

bool is_subset(const std::vector<std::size_t>& inner, const std::vector<std::size_t>& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::string cube_text(const Grid& grid, std::size_t i) {
  std::ostringstream os;
  const Cube& q = grid.cube(i);
  os << "cube " << i << " (level " << q.level << ", center " << q.center << ")";
  return os.str();
}

}  // namespace

Grid Grid::assemble(SpacePtr space, double delta, double epsilon, double c_sandwich,
                    std::vector<Cube> cubes) {
  if (!space) throw Error(Errc::invalid_argument, "grid needs a space");
  if (cubes.empty()) throw Error(Errc::invalid_argument, "grid needs at least one cube");
  // Sort top-down, remapping parent links.
  std::vector<std::size_t> order(cubes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cubes[a].level != cubes[b].level) return cubes[a].level > cubes[b].level;
    return cubes[a].center < cubes[b].center;
  });
  std::vector<std::size_t> new_index(cubes.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_index[order[i]] = i;

  Grid grid;
  grid.space_ = std::move(space);
  grid.id_ = next_grid_id.fetch_add(1);
  grid.delta_ = delta;
  grid.epsilon_ = epsilon;
  grid.c_sandwich_ = c_sandwich;
  grid.cubes_.reserve(cubes.size());
  for (const auto old : order) {
    Cube c = std::move(cubes[old]);
    if (c.parent) {
      if (*c.parent >= new_index.size()) {
        throw Error(Errc::invalid_argument, "parent index out of range");
      }
      c.parent = new_index[*c.parent];
    }
    c.children.clear();
    std::sort(c.members.begin(), c.members.end());
    c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
    for (const auto x : c.members) {
      if (x >= grid.space_->size()) throw Error(Errc::invalid_argument, "member out of range");
    }
    c.mass = grid.space_->mass(c.members);
    grid.cubes_.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < grid.cubes_.size(); ++i) {
    if (const auto p = grid.cubes_[i].parent) grid.cubes_[*p].children.push_back(i);
  }

  grid.k_max_ = grid.cubes_.front().level;
  grid.k_min_ = grid.cubes_.back().level;
  grid.levels_.assign(grid.level_count(), {});
  for (std::size_t i = 0; i < grid.cubes_.size(); ++i) {
    grid.levels_[static_cast<std::size_t>(grid.cubes_[i].level - grid.k_min_)].push_back(i);
  }
  grid.leaf_.assign(grid.space_->size(), std::numeric_limits<std::size_t>::max());
  // Cubes are top-down, so the last writer is the finest cube holding x.
  for (std::size_t i = 0; i < grid.cubes_.size(); ++i) {
    for (const auto x : grid.cubes_[i].members) grid.leaf_[x] = i;
  }
  return grid;
}

double Grid::scale(int level) const { return std::pow(delta_, -level); }

std::span<const std::size_t> Grid::level(int k) const {
  if (k < k_min_ || k > k_max_) return {};
  return levels_[static_cast<std::size_t>(k - k_min_)];
}

std::vector<double> Grid::averages(std::span<const double> f) const {
  std::vector<double> avg(cubes_.size());
  const auto mu = space_->mu();
  for (std::size_t i = 0; i < cubes_.size(); ++i) {
    double sum = 0.0;
    for (const auto x : cubes_[i].members) sum += f[x] * mu[x];
    avg[i] = sum / cubes_[i].mass;
  }
  return avg;
}

bool Grid::contains(std::size_t outer, std::size_t inner) const {
  std::optional<std::size_t> cur = inner;
  while (cur) {
    if (*cur == outer) return true;
    if (cubes_[*cur].level >= cubes_[outer].level) return false;
    cur = cubes_[*cur].parent;
  }
  return false;
}

double default_delta(const Space& space) {
  const double k = space.kappa();
  return 1.0 / (8.0 * k * k * k);
}

Grid build_grid(SpacePtr space, double delta) {
  if (!space) throw Error(Errc::invalid_argument, "grid needs a space");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(Errc::invalid_argument, "delta must lie in (0, 1)");
  }
  const std::size_t n = space->size();
  if (n == 1) {
    Cube only{0, 0, std::nullopt, {}, {0}, 0.0};
    return Grid::assemble(std::move(space), delta, 1.0, 1.0, {only});
  }

  const double kappa = space->kappa();
  const double separation = 3.0 * kappa * kappa;
  const auto scale = [delta](int k) { return std::pow(delta, -k); };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return space->mu(a) > space->mu(b);
  });

  // Coarsest level: the first scale at which one center covers everything.
  const double diam = space->diameter();
  int k_top = static_cast<int>(std::ceil(std::log(diam / separation) / std::log(1.0 / delta)));
  while (!(separation * scale(k_top) > diam)) ++k_top;
  while (separation * scale(k_top - 1) > diam) --k_top;

  // Nested nets, coarse to fine. nets[i] is the net at level k_top - i.
  std::vector<std::vector<std::size_t>> nets{{order.front()}};
  std::vector<char> is_center(n, 0);
  is_center[order.front()] = 1;
  for (int k = k_top - 1; nets.back().size() < n; --k) {
    if (k_top - k > 4096) throw Error(Errc::delta_too_large, "net refinement did not terminate");
    std::vector<std::size_t> net = nets.back();
    const double radius = separation * scale(k);
    for (const auto p : order) {
      if (is_center[p]) continue;
      bool separated = true;
      for (const auto c : net) {
        if (space->rho(p, c) < radius * (1.0 - kRelTol)) {
          separated = false;
          break;
        }
      }
      if (separated) {
        net.push_back(p);
        is_center[p] = 1;
      }
    }
    nets.push_back(std::move(net));
  }
  const std::size_t level_count = nets.size();
  const int k_bottom = k_top - static_cast<int>(level_count) + 1;

  // parent_center[i][c]: parent center (at level k_top - i + 1) of center c.
  std::vector<std::map<std::size_t, std::size_t>> parent_center(level_count);
  for (std::size_t i = 1; i < level_count; ++i) {
    std::vector<char> coarse(n, 0);
    for (const auto c : nets[i - 1]) coarse[c] = 1;
    for (const auto c : nets[i]) {
      if (coarse[c]) {
        parent_center[i][c] = c;
        continue;
      }
      std::size_t best = n;
      double best_d = std::numeric_limits<double>::infinity();
      for (const auto q : nets[i - 1]) {
        const double d = space->rho(c, q);
        if (d < best_d || (d == best_d && q < best)) {
          best = q;
          best_d = d;
        }
      }
      parent_center[i][c] = best;
    }
  }

  // Members bottom-up.
  std::vector<std::map<std::size_t, std::vector<std::size_t>>> members(level_count);
  for (const auto c : nets.back()) members.back()[c] = {c};
  for (std::size_t i = level_count - 1; i >= 1; --i) {
    for (const auto& [c, pts] : members[i]) {
      auto& dst = members[i - 1][parent_center[i].at(c)];
      dst.insert(dst.end(), pts.begin(), pts.end());
    }
  }

  // Drop redundant single-cube levels at the top.
  std::size_t first = 0;
  while (first + 1 < level_count && nets[first].size() == 1 && nets[first + 1].size() == 1) {
    ++first;
  }

  std::vector<Cube> cubes;
  std::vector<std::map<std::size_t, std::size_t>> index_of(level_count);
  for (std::size_t i = first; i < level_count; ++i) {
    for (auto& [c, pts] : members[i]) {
      Cube cube;
      cube.level = k_top - static_cast<int>(i);
      cube.center = c;
      if (i > first) cube.parent = index_of[i - 1].at(parent_center[i].at(c));
      cube.members = pts;
      std::sort(cube.members.begin(), cube.members.end());
      index_of[i][c] = cubes.size();
      cubes.push_back(std::move(cube));
    }
  }

  double epsilon = 1.0;
  double outer = 1.0;
  for (const auto& cube : cubes) {
    const double m = space->mass(cube.members);
    if (cube.parent) {
      epsilon = std::min(epsilon, m / space->mass(cubes[*cube.parent].members));
    }
    const double s = scale(cube.level);
    for (const auto y : cube.members) outer = std::max(outer, space->rho(cube.center, y) / s);
  }
  const double c_sandwich = outer * (1.0 + 1e-9);
  (void)k_bottom;

  Grid grid = Grid::assemble(std::move(space), delta, epsilon, c_sandwich, std::move(cubes));
  const GridReport report = verify_grid(grid);
  if (!report.all_passed()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < report.property.size(); ++i) {
      if (!report.property[i].passed) {
        os << "property " << i + 1 << " failed: " << report.property[i].witness << "; ";
      }
    }
    throw Error(Errc::delta_too_large, os.str());
  }
  return grid;
}

bool GridReport::all_passed() const {
  return std::all_of(property.begin(), property.end(),
                     [](const PropertyCheck& p) { return p.passed; });
}

GridReport verify_grid(const Grid& grid) {
  GridReport report;
  const Space& space = grid.space();
  const std::size_t n = space.size();
  const auto fail = [&](int prop, const std::string& witness) {
    auto& p = report.property[static_cast<std::size_t>(prop - 1)];
    if (p.passed) {
      p.passed = false;
      p.witness = witness;
    }
  };

  // (1) every level partitions X
  std::vector<std::vector<std::size_t>> owner(grid.level_count(),
                                              std::vector<std::size_t>(n, grid.size()));
  for (int k = grid.k_min(); k <= grid.k_max(); ++k) {
    auto& own = owner[static_cast<std::size_t>(k - grid.k_min())];
    std::vector<int> hits(n, 0);
    for (const auto i : grid.level(k)) {
      for (const auto x : grid.cube(i).members) {
        ++hits[x];
        own[x] = i;
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (hits[x] != 1) {
        std::ostringstream os;
        os << "level " << k << ": point " << x << " covered " << hits[x] << " times";
        fail(1, os.str());
        break;
      }
    }
    if (grid.level(k).empty()) fail(1, "level " + std::to_string(k) + " is empty");
  }

  // (2) cubes that meet are nested
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    if (q.members.empty()) {
      fail(2, cube_text(grid, i) + " is empty");
      continue;
    }
    for (int j = q.level + 1; j <= grid.k_max(); ++j) {
      const auto& own = owner[static_cast<std::size_t>(j - grid.k_min())];
      const std::size_t first = own[q.members.front()];
      for (const auto x : q.members) {
        if (own[x] != first) {
          fail(2, cube_text(grid, i) + " straddles level " + std::to_string(j) + " cubes " +
                      std::to_string(first) + " and " + std::to_string(own[x]));
          break;
        }
      }
    }
  }

  // (3) every cube above the finest level has a child inside it
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    if (q.level == grid.k_min()) continue;
    bool ok = false;
    for (const auto c : q.children) {
      const Cube& child = grid.cube(c);
      if (child.level == q.level - 1 && is_subset(child.members, q.members)) ok = true;
    }
    if (!ok) fail(3, cube_text(grid, i) + " has no child");
  }

  // (4) exactly one parent one level up
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    if (q.level == grid.k_max()) {
      if (q.parent) fail(4, cube_text(grid, i) + " is at the top but has a parent");
      continue;
    }
    std::size_t containing = 0;
    for (const auto j : grid.level(q.level + 1)) {
      if (is_subset(q.members, grid.cube(j).members)) ++containing;
    }
    if (containing != 1) {
      fail(4, cube_text(grid, i) + " lies in " + std::to_string(containing) + " parents");
    } else if (!q.parent || grid.cube(*q.parent).level != q.level + 1 ||
               !is_subset(q.members, grid.cube(*q.parent).members)) {
      fail(4, cube_text(grid, i) + " has a stored parent that does not contain it");
    }
  }

  // (5) children keep an epsilon share of the parent's mass
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    if (!q.parent) continue;
    const double parent_mass = grid.cube(*q.parent).mass;
    if (q.mass < grid.epsilon() * parent_mass * (1.0 - kRelTol)) {
      std::ostringstream os;
      os << cube_text(grid, i) << " has mass ratio " << q.mass / parent_mass << " < epsilon "
         << grid.epsilon();
      fail(5, os.str());
    }
  }

  // (6) B(center, scale) within Q within B(center, C scale)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Cube& q = grid.cube(i);
    if (q.center >= n || !std::binary_search(q.members.begin(), q.members.end(), q.center)) {
      fail(6, cube_text(grid, i) + " does not contain its center");
      continue;
    }
    const double s = grid.scale(q.level);
    for (std::size_t y = 0; y < n; ++y) {
      const double d = space.rho(q.center, y);
      const bool member = std::binary_search(q.members.begin(), q.members.end(), y);
      if (within_open(d, s) && !member) {
        fail(6, cube_text(grid, i) + " misses point " + std::to_string(y) + " of its inner ball");
      }
      if (member && !within_open(d, grid.c_sandwich() * s)) {
        fail(6, cube_text(grid, i) + " has point " + std::to_string(y) +
                    " outside its outer ball");
      }
    }
  }
  return report;
}

std::vector<std::size_t> cz_decompose(const Grid& grid, std::span<const double> f,
                                      double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::lambda_nonpositive, "lambda must be positive");
  std::vector<double> abs_f(f.size());
  std::transform(f.begin(), f.end(), abs_f.begin(), [](double v) { return std::abs(v); });
  const auto avg = grid.averages(abs_f);
  std::vector<char> taken(grid.size(), 0);  // cube or an ancestor selected
  std::vector<std::size_t> family;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto parent = grid.cube(i).parent;
    if (parent && taken[*parent]) {
      taken[i] = 1;
      continue;
    }
    if (avg[i] > lambda) {
      taken[i] = 1;
      family.push_back(i);
    }
  }
  return family;
}

namespace {

// Finest family cube on each point's chain (grid.size() if none).
std::vector<std::size_t> finest_family_cube(const Grid& grid, const std::vector<char>& in_family) {
  std::vector<std::size_t> finest(grid.space().size(), grid.size());
  for (std::size_t x = 0; x < finest.size(); ++x) {
    std::optional<std::size_t> cur = grid.leaf()[x];
    while (cur) {
      if (in_family[*cur]) {
        finest[x] = *cur;
        break;
      }
      cur = grid.cube(*cur).parent;
    }
  }
  return finest;
}

SparsityReport sparsity_of(const Grid& grid, const std::vector<std::size_t>& cubes) {
  std::vector<char> in_family(grid.size(), 0);
  for (const auto c : cubes) in_family[c] = 1;
  const auto finest = finest_family_cube(grid, in_family);
  SparsityReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!in_family[i]) continue;
    const Cube& q = grid.cube(i);
    double covered = 0.0;
    for (const auto x : q.members) {
      if (finest[x] != i) covered += grid.space().mu(x);
    }
    const double ratio = covered / q.mass;
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_cube = i;
    }
  }
  report.sparse = report.worst_ratio <= 0.5 * (1.0 + kRelTol);
  return report;
}

}  // namespace

SparsityReport is_sparse(const Grid& grid, std::span<const CubeRef> cubes) {
  std::vector<std::size_t> indices;
  indices.reserve(cubes.size());
  for (const auto& ref : cubes) {
    if (ref.grid_id != grid.id()) {
      throw Error(Errc::mixed_grids, "cube " + std::to_string(ref.cube) +
                                         " belongs to grid " + std::to_string(ref.grid_id));
    }
    if (ref.cube >= grid.size()) throw Error(Errc::invalid_argument, "cube index out of range");
    indices.push_back(ref.cube);
  }
  return sparsity_of(grid, indices);
}

SparsityReport is_sparse(const SparseFamily& family) {
  return sparsity_of(*family.grid, family.cubes);
}

std::vector<std::vector<std::size_t>> designated_sets(const SparseFamily& family) {
  const Grid& grid = *family.grid;
  std::vector<char> in_family(grid.size(), 0);
  for (const auto c : family.cubes) in_family[c] = 1;
  const auto finest = finest_family_cube(grid, in_family);
  std::vector<std::vector<std::size_t>> sets;
  sets.reserve(family.cubes.size());
  for (const auto c : family.cubes) {
    std::vector<std::size_t> e;
    for (const auto x : grid.cube(c).members) {
      if (finest[x] == c) e.push_back(x);
    }
    sets.push_back(std::move(e));
  }
  return sets;
}

namespace {

std::vector<std::size_t> candidates(const Grid& grid, const selection::AllLevels&) {
  std::vector<std::size_t> all(grid.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

std::vector<std::size_t> candidates(const Grid& grid, const selection::CzStack& rule) {
  std::vector<std::size_t> out;
  double max_abs = 0.0;
  std::vector<double> abs_f(rule.f.size());
  for (std::size_t x = 0; x < rule.f.size(); ++x) {
    abs_f[x] = std::abs(rule.f[x]);
    max_abs = std::max(max_abs, abs_f[x]);
  }
  if (max_abs == 0.0) return out;
  const double mean = grid.space().integrate(abs_f) / grid.space().total_mass();
  int m = static_cast<int>(std::floor(std::log2(mean))) - 1;
  for (int guard = 0; std::ldexp(1.0, m) < max_abs && guard < 4096; ++m, ++guard) {
    const auto family = cz_decompose(grid, abs_f, std::ldexp(1.0, m));
    out.insert(out.end(), family.begin(), family.end());
  }
  return out;
}

std::vector<std::size_t> candidates(const Grid& grid, const selection::Random& rule) {
  if (!(rule.p >= 0.0 && rule.p <= 1.0)) {
    throw Error(Errc::invalid_argument, "selection probability must lie in [0, 1]");
  }
  Rng rng = make_rng(rule.seed);
  std::bernoulli_distribution keep(rule.p);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (keep(rng)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> candidates(const Grid& grid, const selection::Explicit& rule) {
  for (const auto c : rule.cubes) {
    if (c >= grid.size()) throw Error(Errc::invalid_argument, "cube index out of range");
  }
  return rule.cubes;
}

}  // namespace

SparseFamily extract_sparse(const Grid& grid, const SelectionRule& rule) {
  auto pool = std::visit([&](const auto& r) { return candidates(grid, r); }, rule);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::vector<char> admitted(grid.size(), 0);
  std::vector<double> covered(grid.size(), 0.0);
  SparseFamily family{&grid, {}};
  for (const auto c : pool) {
    std::optional<std::size_t> anc = grid.cube(c).parent;
    while (anc && !admitted[*anc]) anc = grid.cube(*anc).parent;
    const double m = grid.cube(c).mass;
    if (anc) {
      if (covered[*anc] + m > 0.5 * grid.cube(*anc).mass * (1.0 + kRelTol)) continue;
      covered[*anc] += m;
    }
    admitted[c] = 1;
    family.cubes.push_back(c);
  }
  return family;
}

}  // namespace sht
