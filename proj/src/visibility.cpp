#include "holdercover/visibility.hpp"

#include "holdercover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace holdercover {
namespace {

constexpr double kRayTolerance = 1e-12;

std::vector<std::int64_t> decode(std::uint64_t cell, int d, std::int64_t per_axis) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    idx[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(cell % static_cast<std::uint64_t>(per_axis));
    cell /= static_cast<std::uint64_t>(per_axis);
  }
  return idx;
}

std::uint64_t encode(const std::vector<std::int64_t>& idx, std::int64_t per_axis) {
  std::uint64_t cell = 0;
  for (auto it = idx.rbegin(); it != idx.rend(); ++it)
    cell = cell * static_cast<std::uint64_t>(per_axis) + static_cast<std::uint64_t>(*it);
  return cell;
}

}  // namespace

Vec spherical_project(const Vec& h, const Vec& x, ViewSign sign) {
  if (h.size() != x.size()) throw DomainError("viewpoint and point dimensions differ");
  const Vec diff = h - x;
  const double norm = diff.norm();
  if (!(norm > 0.0)) throw DomainError("point coincides with the viewpoint");
  return sign == ViewSign::toward_viewpoint ? Vec(diff / norm) : Vec(-diff / norm);
}

double Line::distance_to(const Vec& x) const {
  const Vec rel = x - point;
  return (rel - rel.dot(direction) * direction).norm();
}

bool TubeSet::contains(const Vec& x) const {
  return x.norm() <= clip_radius && line.distance_to(x) <= radius;
}

double TubeSet::clipped_length() const {
  const double gap = line.distance_to(Vec::Zero(line.point.size()));
  return gap >= clip_radius ? 0.0 : 2.0 * std::sqrt(clip_radius * clip_radius - gap * gap);
}

double tube_constant(double clip_radius, int d) {
  return 4.0 * clip_radius + 5.0 * std::sqrt(static_cast<double>(d));
}

ViewGrid::ViewGrid(int d, double clip_radius, double mesh) : d_(d), clip_radius_(clip_radius) {
  if (d != 2 && d != 3) throw DomainError("viewpoint grids support d = 2, 3");
  if (!(clip_radius > 0.0) || !(mesh > 0.0)) throw DomainError("need S > 0 and mesh > 0");
  per_axis_ = static_cast<std::int64_t>(std::ceil(2.0 * clip_radius / mesh - 1e-9));
  per_axis_ = std::max<std::int64_t>(per_axis_, 1);
  double cells = 1.0;
  for (int a = 0; a < d; ++a) cells *= static_cast<double>(per_axis_);
  if (cells > 1e10) throw MeshError("viewpoint grid too fine: " + std::to_string(cells) + " cells");
  mesh_ = 2.0 * clip_radius / static_cast<double>(per_axis_);
}

std::uint64_t ViewGrid::cell_count() const {
  std::uint64_t n = 1;
  for (int a = 0; a < d_; ++a) n *= static_cast<std::uint64_t>(per_axis_);
  return n;
}

double ViewGrid::half_diagonal() const { return 0.5 * mesh_ * std::sqrt(static_cast<double>(d_)); }

Vec ViewGrid::center(std::uint64_t cell) const {
  const auto idx = decode(cell, d_, per_axis_);
  Vec c(d_);
  for (int a = 0; a < d_; ++a)
    c[a] = -clip_radius_ + (static_cast<double>(idx[static_cast<std::size_t>(a)]) + 0.5) * mesh_;
  return c;
}

std::uint64_t ViewGrid::cell_of(const Vec& x) const {
  if (x.size() != d_) throw DomainError("point dimension differs from the grid");
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d_));
  for (int a = 0; a < d_; ++a) {
    const auto i = static_cast<std::int64_t>(std::floor((x[a] + clip_radius_) / mesh_));
    idx[static_cast<std::size_t>(a)] = std::clamp<std::int64_t>(i, 0, per_axis_ - 1);
  }
  return encode(idx, per_axis_);
}

bool ViewGrid::in_ball(std::uint64_t cell) const {
  const Vec c = center(cell);
  double sq = 0.0;
  for (int a = 0; a < d_; ++a) {
    const double gap = std::max(0.0, std::abs(c[a]) - 0.5 * mesh_);
    sq += gap * gap;
  }
  return sq <= clip_radius_ * clip_radius_;
}

std::vector<std::uint64_t> ViewGrid::flag_tube(const TubeSet& tube) const {
  if (tube.line.point.size() != d_) throw DomainError("tube dimension differs from the grid");
  const double reach = tube.radius + half_diagonal();
  const Vec& v = tube.line.direction;
  Eigen::Index axis = 0;
  v.cwiseAbs().maxCoeff(&axis);
  const int along = static_cast<int>(axis);
  Vec unit_axis = Vec::Zero(d_);
  unit_axis[along] = 1.0;
  const Vec u = unit_axis - v[along] * v;  // rejection of the axis direction
  const double uu = u.squaredNorm();

  std::vector<std::uint64_t> out;
  std::int64_t others = 1;
  for (int a = 0; a < d_ - 1; ++a) others *= per_axis_;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d_), 0);
  for (std::int64_t o = 0; o < others; ++o) {
    std::int64_t rem = o;
    for (int a = 0; a < d_; ++a) {
      if (a == along) continue;
      idx[static_cast<std::size_t>(a)] = rem % per_axis_;
      rem /= per_axis_;
    }
    // Cell centers on this axis-parallel row: base + s e_along, s the along-axis coordinate.
    Vec base(d_);
    for (int a = 0; a < d_; ++a)
      base[a] = a == along ? 0.0 : -clip_radius_ + (static_cast<double>(idx[static_cast<std::size_t>(a)]) + 0.5) * mesh_;
    const Vec rel = base - tube.line.point;
    const Vec w = rel - rel.dot(v) * v;
    double lo = 0.0, hi = 0.0;
    if (uu < 1e-18) {
      if (w.norm() > reach) continue;
      lo = -std::numeric_limits<double>::infinity();
      hi = std::numeric_limits<double>::infinity();
    } else {
      const double s_star = -w.dot(u) / uu;
      const double floor_sq = (w + s_star * u).squaredNorm();
      if (floor_sq > reach * reach) continue;
      const double half = std::sqrt((reach * reach - floor_sq) / uu);
      lo = s_star - half;
      hi = s_star + half;
    }
    // Centers at -S + (i + 1/2) mesh within [lo, hi].
    const double first = std::ceil((lo + clip_radius_) / mesh_ - 0.5);
    const double last = std::floor((hi + clip_radius_) / mesh_ - 0.5);
    const auto i0 = static_cast<std::int64_t>(std::max(0.0, first));
    const auto i1 = static_cast<std::int64_t>(std::min(static_cast<double>(per_axis_ - 1), last));
    for (std::int64_t i = i0; i <= i1; ++i) {
      idx[static_cast<std::size_t>(along)] = i;
      const std::uint64_t cell = encode(idx, per_axis_);
      if (in_ball(cell)) out.push_back(cell);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double grid_content(const ViewGrid& grid, const std::vector<std::uint64_t>& cells, double exponent) {
  if (!(exponent > 0.0)) throw DomainError("content exponent must be positive");
  if (cells.empty()) return 0.0;
  const int d = grid.dim();
  const double root_d = std::sqrt(static_cast<double>(d));
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> blocks(cells.size());
  for (int j = 0;; ++j) {
    const std::int64_t width = std::int64_t{1} << j;
    const std::int64_t per = (grid.cells_per_axis() + width - 1) / width;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      auto idx = decode(cells[c], d, grid.cells_per_axis());
      for (auto& i : idx) i /= width;
      blocks[c] = encode(idx, per);
    }
    std::vector<std::uint64_t> sorted = blocks;
    std::sort(sorted.begin(), sorted.end());
    const auto count = static_cast<double>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    const double diameter = static_cast<double>(width) * grid.mesh() * root_d;
    best = std::min(best, count * std::pow(diameter, exponent));
    if (per == 1) break;
  }
  return best;
}

TubeReport tube_exceptional_points(const std::vector<PairFamily>& families,
                                   const CoverParams& params, const ViewGrid& grid, Exec exec) {
  params.validate();
  if (params.k != 1) throw DomainError("tube accumulation needs k = 1");
  if (params.d != grid.dim()) throw DomainError("grid dimension differs from params.d");

  TubeReport report;
  report.tube_constant = tube_constant(grid.clip_radius(), grid.dim());
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& fam : families)
    for (const auto& p : fam.pairs)
      smallest = std::min(smallest, report.tube_constant * doubled_radius(fam.level) / p.center_distance);
  if (grid.mesh() > smallest)
    throw MeshError("grid mesh " + std::to_string(grid.mesh()) + " exceeds the smallest tube radius " +
                    std::to_string(smallest));

  for (const auto& fam : families) {
    TubeLevel lv;
    lv.level = fam.level;
    const double r = doubled_radius(fam.level);
    for (const auto& p : fam.pairs) {
      const Vec a = fam.cubes[p.first].center();
      const Vec b = fam.cubes[p.second].center();
      TubeSet tube{Line{a, unit_direction(b, a)}, report.tube_constant * r / p.center_distance,
                   grid.clip_radius()};
      lv.tubes.push_back(std::move(tube));
    }
    const auto m = static_cast<std::int64_t>(lv.tubes.size());
    std::vector<std::vector<std::uint64_t>> hits(lv.tubes.size());
    if (exec == Exec::serial) {
      for (std::int64_t i = 0; i < m; ++i)
        hits[static_cast<std::size_t>(i)] = grid.flag_tube(lv.tubes[static_cast<std::size_t>(i)]);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
      for (std::int64_t i = 0; i < m; ++i)
        hits[static_cast<std::size_t>(i)] = grid.flag_tube(lv.tubes[static_cast<std::size_t>(i)]);
    }
    for (auto& h : hits) lv.flagged.insert(lv.flagged.end(), h.begin(), h.end());
    std::sort(lv.flagged.begin(), lv.flagged.end());
    lv.flagged.erase(std::unique(lv.flagged.begin(), lv.flagged.end()), lv.flagged.end());
    lv.content = grid_content(grid, lv.flagged, params.w + 1.0);
    report.levels.push_back(std::move(lv));
  }

  std::vector<double> xs, ys;
  for (const auto& lv : report.levels) {
    if (lv.content > 0.0) {
      xs.push_back(lv.level);
      ys.push_back(std::log2(lv.content));
    }
  }
  report.vacuous = xs.empty();
  if (xs.size() >= 2) report.decay = least_squares(xs, ys);
  return report;
}

PolarResult polar_graph_cover(const PointSample& sample, const Vec& viewpoint, double alpha,
                              Exec exec) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("Hölder exponent must lie in (0, 1]");
  if (viewpoint.size() != sample.dim()) throw DomainError("viewpoint dimension differs from the sample");
  const std::vector<Vec> pts = sample.points();
  PolarGraph graph;
  graph.viewpoint = viewpoint;
  graph.alpha = alpha;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if ((pts[i] - viewpoint).norm() == 0.0)
      throw DomainError("viewpoint coincides with sample point " + std::to_string(i));
    graph.directions.push_back(spherical_project(viewpoint, pts[i]));
    graph.radii.push_back((viewpoint - pts[i]).norm());
  }

  // Same-ray detection: sweep in order of the first direction coordinate.
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = graph.directions[a][0], kb = graph.directions[b][0];
    return ka < kb || (ka == kb && a < b);
  });
  std::optional<std::pair<std::size_t, std::size_t>> blocking;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::size_t i = order[a], j = order[b];
      if (graph.directions[j][0] - graph.directions[i][0] > kRayTolerance) break;
      if ((graph.directions[i] - graph.directions[j]).norm() <= kRayTolerance) {
        const std::pair<std::size_t, std::size_t> p{std::min(i, j), std::max(i, j)};
        if (!blocking || p < *blocking) blocking = p;
      }
    }
  }
  PolarResult result;
  if (blocking) {
    result.blocking = blocking;
    return result;
  }

  const auto n = static_cast<std::int64_t>(pts.size());
  std::vector<double> row_max(pts.size(), 0.0);
  auto scan = [&](std::int64_t ii) {
    const auto i = static_cast<std::size_t>(ii);
    double best = 0.0;
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double chord = (graph.directions[i] - graph.directions[j]).norm();
      const double geodesic = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
      best = std::max(best, std::abs(graph.radii[i] - graph.radii[j]) / std::pow(geodesic, alpha));
    }
    row_max[i] = best;
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  }
  for (double v : row_max) graph.constant = std::max(graph.constant, v);
  result.graph = std::move(graph);
  return result;
}

}  // namespace holdercover
