#pragma once

#include "holdercover/exec.hpp"
#include "holdercover/lattice.hpp"
#include "holdercover/linalg.hpp"
#include "holdercover/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace holdercover {

/// Retention probability 2^(t - d) giving a t-dimensional limit set.
double retention_probability(int d, double t);

/// Uniform [0,1) coin of one cube, a pure function of (seed, level, code).
double retention_coin(std::uint64_t seed, int level, std::uint64_t code);

/// Linear cube code c_0 + c_1 2^n + ... at level n.
std::uint64_t cube_code(const LatticeCube& cube);
LatticeCube cube_from_code(int dim, int level, std::uint64_t code);

/// Fractal percolation to a finite depth in base 2.
struct PercolationTree {
  int d = 2;
  double p = 1.0;
  int depth = 0;
  std::uint64_t seed = 0;
  /// Sorted codes of the retained cubes, one vector per level 0..depth.
  std::vector<std::vector<std::uint64_t>> levels;

  bool extinct() const { return levels.back().empty(); }
  std::size_t retained(int level) const { return levels[static_cast<std::size_t>(level)].size(); }
  std::vector<LatticeCube> cubes(int level) const;
  /// Retained level-`level` cubes lying inside `ancestor`.
  std::vector<LatticeCube> cubes_within(const LatticeCube& ancestor, int level) const;
  bool retains(const LatticeCube& cube) const;
};

/// Requires 0 < p <= 1, 1 <= d <= 3, depth * d <= 30.
PercolationTree simulate(int d, double p, int depth, std::uint64_t seed,
                         Exec exec = Exec::parallel);

struct NaturalMeasureWeights {
  int level = 0;
  double weight = 0.0;  // p^-n 2^-dn per retained cube
  std::size_t cubes = 0;
  double total_mass = 0.0;
};

NaturalMeasureWeights natural_measure(const PercolationTree& tree, int level);

/// Equiangular cube-sphere cells: each face of [-1,1]^d split into 2^m equal-angle
/// bins per tangent axis, angular size (pi/2) 2^-m. Supports d = 2, 3.
std::uint64_t angular_cell_count(int d, int m);
std::uint64_t angular_cell(const Vec& unit, int m);

struct DirectionSlope {
  std::vector<int> resolutions;
  std::vector<std::uint64_t> counts;
  LinearFit fit;  // log count against m log 2
};

/// Box-count slope of the directions y - x over retained depth-level cube centers,
/// x under q1, y under q2. Throws ExtinctionError when either subtree is empty.
DirectionSlope direction_slope(const PercolationTree& tree, const LatticeCube& q1,
                               const LatticeCube& q2, int first_resolution, int last_resolution,
                               Exec exec = Exec::parallel);

/// Default transversal pair: level-2 corner cubes at the origin and opposite corner.
std::pair<LatticeCube, LatticeCube> default_transversal_cubes(int d);

/// Fraction of angular cells hit by ordered pairs of distinct retained depth-level
/// cube centers. Zero for an extinct tree.
double sphere_coverage(const PercolationTree& tree, int m, Exec exec = Exec::parallel);

/// Rejection sampling over consecutive seeds for trees alive at `depth`; when
/// `within` is given both of its cubes must keep retained descendants.
struct SurvivorDraw {
  std::vector<std::uint64_t> seeds;
  std::size_t rejected = 0;
};
SurvivorDraw draw_survivors(int d, double p, int depth, std::uint64_t first_seed,
                            std::size_t wanted, std::size_t max_attempts,
                            const std::optional<std::pair<LatticeCube, LatticeCube>>& within =
                                std::nullopt,
                            Exec exec = Exec::parallel);

/// Monte Carlo over consecutive seeds: retained counts per level for each seed.
struct SeedSurvey {
  int d = 2;
  double p = 1.0;
  int depth = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<std::size_t>> counts;  // [seed][level]

  MeanEstimate mean_count(int level) const;
  MeanEstimate mean_mass(int level) const;
};

SeedSurvey survey(int d, double p, int depth, std::uint64_t first_seed, std::size_t seeds,
                  Exec exec = Exec::parallel);

}  // namespace holdercover
