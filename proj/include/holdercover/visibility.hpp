#pragma once

#include "holdercover/cover.hpp"
#include "holdercover/exec.hpp"
#include "holdercover/lattice.hpp"
#include "holdercover/linalg.hpp"
#include "holdercover/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace holdercover {

enum class ViewSign { toward_viewpoint, away_from_viewpoint };

/// (h - x) / |h - x| (or its negative). Throws DomainError when x == h.
Vec spherical_project(const Vec& h, const Vec& x,
                      ViewSign sign = ViewSign::toward_viewpoint);

struct Line {
  Vec point;
  Vec direction;  // unit
  double distance_to(const Vec& x) const;
};

/// Points within `radius` of the line, clipped to the ball B(0, clip_radius).
struct TubeSet {
  Line line;
  double radius = 0.0;
  double clip_radius = 1.0;
  bool contains(const Vec& x) const;
  /// Length of the line segment inside the clip ball.
  double clipped_length() const;
};

/// C_S = 4S + 5 sqrt(d): every viewpoint in B(0,S) on a line through radius-r balls
/// with center separation R in [0,1]^d lies within C_S r / R of their center line.
double tube_constant(double clip_radius, int d);

/// Regular grid of cubes of side `mesh` over [-S, S]^d, keeping cells that meet B(0,S).
class ViewGrid {
 public:
  /// The side is 2S / ceil(2S / mesh) <= mesh. d in {2, 3}.
  ViewGrid(int d, double clip_radius, double mesh);

  int dim() const { return d_; }
  double clip_radius() const { return clip_radius_; }
  double mesh() const { return mesh_; }
  std::int64_t cells_per_axis() const { return per_axis_; }
  std::uint64_t cell_count() const;
  double half_diagonal() const;

  Vec center(std::uint64_t cell) const;
  std::uint64_t cell_of(const Vec& x) const;  // clamps to the grid
  bool in_ball(std::uint64_t cell) const;

  /// Cells (meeting the clip ball) that may intersect the tube. Sorted.
  std::vector<std::uint64_t> flag_tube(const TubeSet& tube) const;

 private:
  int d_;
  double clip_radius_;
  double mesh_;
  std::int64_t per_axis_;
};

/// Upper estimate of the `exponent`-dimensional Hausdorff content of a union of grid
/// cells: min over aligned blocks of 2^j x ... x 2^j cells of (blocks hit) (block diameter)^exponent.
double grid_content(const ViewGrid& grid, const std::vector<std::uint64_t>& cells,
                    double exponent);

struct TubeLevel {
  int level = 0;
  std::vector<TubeSet> tubes;
  std::vector<std::uint64_t> flagged;
  double content = 0.0;  // (w+1)-content estimate
};

struct TubeReport {
  std::vector<TubeLevel> levels;
  std::optional<LinearFit> decay;  // log2 content against level
  bool vacuous = true;
  double tube_constant = 0.0;
};

/// For each level's pair family, flags grid cells meeting T(C_S r / R) around each
/// pair's center line, with r the doubled-cube radius. Throws MeshError when the
/// mesh exceeds the smallest tube radius. Params must have k = 1 (g = 0).
TubeReport tube_exceptional_points(const std::vector<PairFamily>& families,
                                   const CoverParams& params, const ViewGrid& grid,
                                   Exec exec = Exec::parallel);

struct PolarGraph {
  Vec viewpoint;
  std::vector<Vec> directions;
  std::vector<double> radii;
  double alpha = 0.0;
  /// max |f(u) - f(u')| / geodesic(u, u')^alpha over sample pairs.
  double constant = 0.0;
};

struct PolarResult {
  std::optional<PolarGraph> graph;
  std::optional<std::pair<std::size_t, std::size_t>> blocking;  // same ray from h
  bool ok() const { return graph.has_value(); }
};

/// Polar graph f_h(u) = |h - x| over the sample when the spherical projection is
/// injective (to 1e-12), else the first blocking pair. Throws DomainError if h is a
/// sample point.
PolarResult polar_graph_cover(const PointSample& sample, const Vec& viewpoint, double alpha,
                              Exec exec = Exec::parallel);

}  // namespace holdercover
