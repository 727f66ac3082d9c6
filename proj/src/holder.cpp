#include "holdercover/cover.hpp"
#include "holdercover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace holdercover {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("Hölder exponent must lie in (0, 1]");
}

}  // namespace

GraphMap build_graph_function(const std::vector<Vec>& points, const KPlane& plane) {
  if (points.empty()) throw DomainError("empty point set");
  const Mat across = plane.complement_frame();
  GraphMap f;
  f.keys.reserve(points.size());
  f.values.reserve(points.size());
  for (const Vec& x : points) {
    if (x.size() != plane.dim()) throw DomainError("point and plane dimensions differ");
    f.keys.push_back(across.transpose() * x);
    f.values.push_back(plane.frame().transpose() * x);
  }
  if (across.cols() == 0) {
    if (points.size() > 1) throw CollisionError(0, 1, "projection onto the zero space");
    return f;
  }

  // Sweep in order of the first key coordinate; report the lexicographically first collision.
  constexpr double kTol = 1e-12;
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f.keys[a][0] < f.keys[b][0] || (f.keys[a][0] == f.keys[b][0] && a < b);
  });
  std::optional<std::pair<std::size_t, std::size_t>> worst;
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const std::size_t i = order[a], j = order[b];
      if (f.keys[j][0] - f.keys[i][0] > kTol) break;
      if ((f.keys[i] - f.keys[j]).norm() <= kTol) {
        const std::pair<std::size_t, std::size_t> p{std::min(i, j), std::max(i, j)};
        if (!worst || p < *worst) worst = p;
      }
    }
  }
  if (worst)
    throw CollisionError(worst->first, worst->second,
                         "points " + std::to_string(worst->first) + " and " +
                             std::to_string(worst->second) + " project to the same key");
  return f;
}

GraphMap build_graph_function(const PointSample& sample, const KPlane& plane) {
  return build_graph_function(sample.points(), plane);
}

Vec holder_constants(const GraphMap& f, double alpha) {
  check_alpha(alpha);
  if (f.size() == 0) throw DomainError("empty map");
  const auto comps = f.values.front().size();
  Vec c = Vec::Zero(comps);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      const double gap = (f.keys[i] - f.keys[j]).norm();
      if (gap == 0.0) throw CollisionError(i, j, "duplicate keys");
      const double scale = std::pow(gap, alpha);
      for (Eigen::Index a = 0; a < comps; ++a)
        c[a] = std::max(c[a], std::abs(f.values[i][a] - f.values[j][a]) / scale);
    }
  }
  return c;
}

double holder_constant(const GraphMap& f, double alpha) {
  const Vec c = holder_constants(f, alpha);
  return c.size() == 0 ? 0.0 : c.maxCoeff();
}

HolderExtension::HolderExtension(GraphMap f, double alpha, Vec constants)
    : f_(std::move(f)), alpha_(alpha), constants_(std::move(constants)) {
  const Vec measured = holder_constants(f_, alpha_);
  if (constants_.size() != measured.size()) throw DomainError("one constant per value component");
  for (Eigen::Index a = 0; a < measured.size(); ++a)
    if (constants_[a] < measured[a] * (1.0 - 1e-12))
      throw DomainError("constant below the measured Hölder constant of component " +
                        std::to_string(a));
}

HolderExtension::HolderExtension(GraphMap f, double alpha, double constant)
    : HolderExtension(f, alpha, Vec::Constant(f.values.empty() ? 0 : f.values.front().size(), constant)) {}

Vec HolderExtension::operator()(const Vec& y) const {
  if (y.size() != f_.keys.front().size()) throw DomainError("query has the wrong dimension");
  Vec best = Vec::Constant(constants_.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < f_.size(); ++i) {
    const double gap = (y - f_.keys[i]).norm();
    if (gap == 0.0) return f_.values[i];
    const double lift = std::pow(gap, alpha_);
    for (Eigen::Index a = 0; a < best.size(); ++a)
      best[a] = std::min(best[a], f_.values[i][a] + constants_[a] * lift);
  }
  return best;
}

ConeResult lipschitz_from_cone(const PointSample& sample, const KPlane& plane, double eps) {
  if (!(eps > 0.0 && eps < std::numbers::pi / 2)) throw DomainError("cone angle must lie in (0, pi/2)");
  if (sample.dim() != plane.dim()) throw DomainError("sample and plane dimensions differ");
  const std::vector<Vec> pts = sample.points();
  ConeResult out;
  out.min_angle = std::numbers::pi / 2;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec diff = pts[i] - pts[j];
      const double angle = line_plane_angle(Vec(diff / diff.norm()), plane);
      out.min_angle = std::min(out.min_angle, angle);
      if (angle < eps - 1e-12) {
        if (!out.witness) out.witness = std::make_pair(i, j);
        continue;
      }
      const double along = (plane.frame().transpose() * diff).norm();
      const double across = plane.reject(diff).norm();
      out.constant = std::max(out.constant, along / across);
    }
  }
  out.lipschitz = !out.witness.has_value();
  if (!out.lipschitz) out.constant = 0.0;
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> en_witness(const PointSample& sample,
                                                              const KPlane& plane, int n) {
  if (n < 1) throw DomainError("N must be at least 1");
  if (sample.dim() != plane.dim()) throw DomainError("sample and plane dimensions differ");
  const std::vector<Vec> pts = sample.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec diff = pts[i] - pts[j];
      const double proj = plane.reject(diff).norm();
      if (proj < 1.0 && diff.norm() > n * std::pow(proj, 1.0 / n)) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace holdercover
