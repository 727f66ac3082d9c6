#include "holdercover/percolation.hpp"

#include "holdercover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace holdercover {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::size_t kLevelLimit = std::size_t{1} << 27;

// Integer coordinate differences y - x packed into one word, 21 bits per axis.
std::uint64_t pack_diff(const std::array<std::int64_t, kMaxDim>& a,
                        const std::array<std::int64_t, kMaxDim>& b, int d) {
  std::uint64_t out = 0;
  for (int i = 0; i < d; ++i) {
    const auto delta = static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)] -
                                                  a[static_cast<std::size_t>(i)] + (1 << 20));
    out |= delta << (21 * i);
  }
  return out;
}

Vec unpack_diff(std::uint64_t packed, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i)
    v[i] = static_cast<double>(static_cast<std::int64_t>((packed >> (21 * i)) & ((1U << 21) - 1)) -
                               (1 << 20));
  return v;
}

// Sorted distinct differences y - x over x in `from`, y in `to`, x != y.
std::vector<std::uint64_t> distinct_differences(const std::vector<LatticeCube>& from,
                                                const std::vector<LatticeCube>& to, int d,
                                                Exec exec) {
  const auto n = static_cast<std::int64_t>(from.size());
  std::vector<std::vector<std::uint64_t>> rows(from.size());
  auto scan = [&](std::int64_t i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    const auto& x = from[static_cast<std::size_t>(i)];
    row.reserve(to.size());
    for (const auto& y : to)
      if (y.coords != x.coords) row.push_back(pack_diff(x.coords, y.coords, d));
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  }
  std::vector<std::uint64_t> all;
  for (auto& row : rows) all.insert(all.end(), row.begin(), row.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::size_t cells_hit(const std::vector<std::uint64_t>& diffs, int d, int m) {
  std::vector<std::uint64_t> cells;
  cells.reserve(diffs.size());
  for (auto packed : diffs) {
    const Vec v = unpack_diff(packed, d);
    cells.push_back(angular_cell(v / v.norm(), m));
  }
  std::sort(cells.begin(), cells.end());
  return static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

void check_shape(int d, int depth) {
  if (d < 1 || d > 3) throw DomainError("percolation supports d = 1..3");
  if (depth < 0 || depth * d > 30) throw DomainError("depth * d must be at most 30");
}

}  // namespace

double retention_probability(int d, double t) {
  if (!(t > 0.0) || t > d) throw DomainError("t must lie in (0, d]");
  return std::exp2(t - d);
}

double retention_coin(std::uint64_t seed, int level, std::uint64_t code) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ static_cast<std::uint64_t>(level));
  h = splitmix(h ^ code);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::uint64_t cube_code(const LatticeCube& cube) {
  std::uint64_t code = 0;
  for (int a = cube.dim - 1; a >= 0; --a)
    code = (code << cube.level) | static_cast<std::uint64_t>(cube.coords[static_cast<std::size_t>(a)]);
  return code;
}

LatticeCube cube_from_code(int dim, int level, std::uint64_t code) {
  LatticeCube cube;
  cube.base = 2;
  cube.level = level;
  cube.dim = dim;
  const std::uint64_t mask = (std::uint64_t{1} << level) - 1;
  for (int a = 0; a < dim; ++a) {
    cube.coords[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(code & mask);
    code >>= level;
  }
  return cube;
}

std::vector<LatticeCube> PercolationTree::cubes(int level) const {
  std::vector<LatticeCube> out;
  out.reserve(retained(level));
  for (auto code : levels[static_cast<std::size_t>(level)]) out.push_back(cube_from_code(d, level, code));
  return out;
}

std::vector<LatticeCube> PercolationTree::cubes_within(const LatticeCube& ancestor, int level) const {
  std::vector<LatticeCube> out;
  for (auto code : levels[static_cast<std::size_t>(level)]) {
    LatticeCube c = cube_from_code(d, level, code);
    if (ancestor.contains(c)) out.push_back(c);
  }
  return out;
}

bool PercolationTree::retains(const LatticeCube& cube) const {
  if (cube.level > depth || cube.dim != d) return false;
  const auto& lv = levels[static_cast<std::size_t>(cube.level)];
  return std::binary_search(lv.begin(), lv.end(), cube_code(cube));
}

PercolationTree simulate(int d, double p, int depth, std::uint64_t seed, Exec exec) {
  check_shape(d, depth);
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  PercolationTree tree{d, p, depth, seed, {}};
  tree.levels.push_back({0});
  const int children = 1 << d;
  for (int n = 0; n < depth; ++n) {
    const auto& parents = tree.levels.back();
    const auto count = static_cast<std::int64_t>(parents.size());
    std::vector<std::vector<std::uint64_t>> kids(parents.size());
    auto grow = [&](std::int64_t i) {
      const LatticeCube parent = cube_from_code(d, n, parents[static_cast<std::size_t>(i)]);
      auto& out = kids[static_cast<std::size_t>(i)];
      for (int c = 0; c < children; ++c) {
        LatticeCube child = parent;
        child.level = n + 1;
        for (int a = 0; a < d; ++a)
          child.coords[static_cast<std::size_t>(a)] = 2 * parent.coords[static_cast<std::size_t>(a)] + ((c >> a) & 1);
        const std::uint64_t code = cube_code(child);
        if (p >= 1.0 || retention_coin(seed, n + 1, code) < p) out.push_back(code);
      }
    };
    if (exec == Exec::serial) {
      for (std::int64_t i = 0; i < count; ++i) grow(i);
    } else {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < count; ++i) grow(i);
    }
    std::vector<std::uint64_t> next;
    for (auto& k : kids) next.insert(next.end(), k.begin(), k.end());
    if (next.size() > kLevelLimit) throw DomainError("percolation level exceeds 2^27 cubes");
    std::sort(next.begin(), next.end());
    tree.levels.push_back(std::move(next));
  }
  return tree;
}

NaturalMeasureWeights natural_measure(const PercolationTree& tree, int level) {
  if (level < 0 || level > tree.depth) throw DomainError("level beyond the tree depth");
  NaturalMeasureWeights w;
  w.level = level;
  w.weight = std::pow(tree.p, -level) * std::exp2(-tree.d * level);
  w.cubes = tree.retained(level);
  w.total_mass = w.weight * static_cast<double>(w.cubes);
  return w;
}

std::uint64_t angular_cell_count(int d, int m) {
  if (d != 2 && d != 3) throw DomainError("angular cells need d = 2 or 3");
  if (m < 0 || m > 20) throw DomainError("resolution out of range");
  std::uint64_t bins = std::uint64_t{1} << m;
  return static_cast<std::uint64_t>(2 * d) * (d == 2 ? bins : bins * bins);
}

std::uint64_t angular_cell(const Vec& unit, int m) {
  const int d = static_cast<int>(unit.size());
  if (d != 2 && d != 3) throw DomainError("angular cells need d = 2 or 3");
  Eigen::Index axis = 0;
  unit.cwiseAbs().maxCoeff(&axis);
  const double lead = unit[axis];
  if (lead == 0.0) throw DomainError("zero direction");
  const std::uint64_t face = static_cast<std::uint64_t>(2 * axis + (lead < 0 ? 1 : 0));
  const std::uint64_t bins = std::uint64_t{1} << m;
  std::uint64_t cell = face;
  for (int a = 0; a < d; ++a) {
    if (a == axis) continue;
    const double angle = std::atan(unit[a] / std::abs(lead));  // [-pi/4, pi/4]
    auto bin = static_cast<std::int64_t>(std::floor((angle / (std::numbers::pi / 2) + 0.5) *
                                                    static_cast<double>(bins)));
    bin = std::clamp<std::int64_t>(bin, 0, static_cast<std::int64_t>(bins) - 1);
    cell = cell * bins + static_cast<std::uint64_t>(bin);
  }
  return cell;
}

DirectionSlope direction_slope(const PercolationTree& tree, const LatticeCube& q1,
                               const LatticeCube& q2, int first_resolution, int last_resolution,
                               Exec exec) {
  if (first_resolution < 0 || last_resolution < first_resolution + 1)
    throw DomainError("need at least two resolutions");
  if (last_resolution > tree.depth) throw DomainError("resolution beyond the tree depth");
  if (q1.level > tree.depth || q2.level > tree.depth) throw DomainError("cube below the tree depth");
  const auto xs = tree.cubes_within(q1, tree.depth);
  const auto ys = tree.cubes_within(q2, tree.depth);
  if (xs.empty() || ys.empty())
    throw ExtinctionError("no retained depth-level cubes under one of the transversal cubes");
  const auto diffs = distinct_differences(xs, ys, tree.d, exec);
  DirectionSlope out;
  std::vector<double> x, y;
  for (int m = first_resolution; m <= last_resolution; ++m) {
    const std::size_t count = cells_hit(diffs, tree.d, m);
    out.resolutions.push_back(m);
    out.counts.push_back(count);
    x.push_back(m * std::numbers::ln2);
    y.push_back(std::log(static_cast<double>(count)));
  }
  out.fit = least_squares(x, y);
  return out;
}

std::pair<LatticeCube, LatticeCube> default_transversal_cubes(int d) {
  LatticeCube low, high;
  low.base = high.base = 2;
  low.level = high.level = 2;
  low.dim = high.dim = d;
  for (int a = 0; a < d; ++a) high.coords[static_cast<std::size_t>(a)] = 3;
  return {low, high};
}

double sphere_coverage(const PercolationTree& tree, int m, Exec exec) {
  if (tree.extinct()) return 0.0;
  if (m > tree.depth) throw DomainError("resolution beyond the tree depth");
  const auto cubes = tree.cubes(tree.depth);
  const auto diffs = distinct_differences(cubes, cubes, tree.d, exec);
  if (diffs.empty()) return 0.0;
  return static_cast<double>(cells_hit(diffs, tree.d, m)) /
         static_cast<double>(angular_cell_count(tree.d, m));
}

SurvivorDraw draw_survivors(int d, double p, int depth, std::uint64_t first_seed,
                            std::size_t wanted, std::size_t max_attempts,
                            const std::optional<std::pair<LatticeCube, LatticeCube>>& within,
                            Exec exec) {
  SurvivorDraw draw;
  constexpr std::int64_t kBatch = 64;
  std::uint64_t next = first_seed;
  std::size_t attempts = 0;
  while (draw.seeds.size() < wanted) {
    if (attempts >= max_attempts)
      throw ExtinctionError("only " + std::to_string(draw.seeds.size()) + " of " +
                            std::to_string(wanted) + " trees survived in " +
                            std::to_string(max_attempts) + " attempts");
    std::vector<std::uint8_t> alive(kBatch, 0);
    auto test = [&](std::int64_t i) {
      const PercolationTree tree = simulate(d, p, depth, next + static_cast<std::uint64_t>(i), Exec::serial);
      bool ok = !tree.extinct();
      if (ok && within)
        ok = !tree.cubes_within(within->first, depth).empty() &&
             !tree.cubes_within(within->second, depth).empty();
      alive[static_cast<std::size_t>(i)] = ok;
    };
    if (exec == Exec::serial) {
      for (std::int64_t i = 0; i < kBatch; ++i) test(i);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
      for (std::int64_t i = 0; i < kBatch; ++i) test(i);
    }
    for (std::int64_t i = 0; i < kBatch && draw.seeds.size() < wanted && attempts < max_attempts; ++i) {
      ++attempts;
      if (alive[static_cast<std::size_t>(i)])
        draw.seeds.push_back(next + static_cast<std::uint64_t>(i));
      else
        ++draw.rejected;
    }
    next += kBatch;
  }
  return draw;
}

MeanEstimate SeedSurvey::mean_count(int level) const {
  std::vector<double> v;
  for (const auto& c : counts) v.push_back(static_cast<double>(c[static_cast<std::size_t>(level)]));
  return mean_with_error(v);
}

MeanEstimate SeedSurvey::mean_mass(int level) const {
  const double weight = std::pow(p, -level) * std::exp2(-d * level);
  std::vector<double> v;
  for (const auto& c : counts) v.push_back(weight * static_cast<double>(c[static_cast<std::size_t>(level)]));
  return mean_with_error(v);
}

SeedSurvey survey(int d, double p, int depth, std::uint64_t first_seed, std::size_t seeds, Exec exec) {
  check_shape(d, depth);
  SeedSurvey out{d, p, depth, {}, {}};
  out.counts.resize(seeds);
  for (std::size_t i = 0; i < seeds; ++i) out.seeds.push_back(first_seed + i);
  const auto n = static_cast<std::int64_t>(seeds);
  auto run = [&](std::int64_t i) {
    const PercolationTree tree = simulate(d, p, depth, first_seed + static_cast<std::uint64_t>(i), Exec::serial);
    auto& row = out.counts[static_cast<std::size_t>(i)];
    for (int n2 = 0; n2 <= depth; ++n2) row.push_back(tree.retained(n2));
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) run(i);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) run(i);
  }
  return out;
}

}  // namespace holdercover
