#include "holdercover/directions.hpp"

#include "holdercover/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace holdercover {
namespace {

void require_same_shape(const KPlane& v, const KPlane& w) {
  if (v.dim() != w.dim() || v.rank() != w.rank())
    throw DomainError("planes of different shapes: G(" + std::to_string(v.dim()) + "," +
                      std::to_string(v.rank()) + ") vs G(" + std::to_string(w.dim()) + "," +
                      std::to_string(w.rank()) + ")");
}

// Largest singular value of (I - P_V) W; the caller guarantees equal shapes.
double metric_unchecked(const Mat& v, const Mat& w) {
  if (v.cols() == 1) {
    return std::min(1.0, (w.col(0) - v.col(0) * v.col(0).dot(w.col(0))).norm());
  }
  const Mat r = w - v * (v.transpose() * w);
  const Mat g = r.transpose() * r;
  double top = 0.0;
  if (g.rows() == 2) {
    const double a = g(0, 0), b = g(0, 1), c = g(1, 1);
    top = 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> eig(g, Eigen::EigenvaluesOnly);
    top = eig.eigenvalues().maxCoeff();
  }
  return std::min(1.0, std::sqrt(std::max(0.0, top)));
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<KPlane> random_planes(int d, int k, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<KPlane> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_plane(d, k, rng));
  return out;
}

KPlane coordinate_plane(int d, int k) {
  return KPlane::from_frame(Mat::Identity(d, k));
}

std::size_t pool_size(int manifold_dim, double epsilon) {
  const double ratio = 4.0 / epsilon;
  const double m = manifold_dim;
  const double raw = 4.0 * std::pow(ratio, m) * (1.0 + m * std::log(ratio));
  return static_cast<std::size_t>(std::clamp(raw, 20000.0, 4.0e6));
}

// Farthest-point selection: repeatedly adds the pool plane farthest from the chosen
// centers until every pool plane lies within `stop` of one. Gaps are kept squared.
std::vector<KPlane> farthest_point_net(const std::vector<KPlane>& pool, double stop, Exec exec) {
  const auto n = static_cast<std::int64_t>(pool.size());
  const int d = pool.front().dim();
  const bool lines = pool.front().rank() == 1;
  // Lines are compared through a flat copy of their unit vectors.
  std::vector<double> flat;
  if (lines) {
    flat.resize(pool.size() * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (int a = 0; a < d; ++a) flat[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] = pool[i].frame()(a, 0);
  }
  std::vector<double> gap(pool.size(), std::numeric_limits<double>::infinity());
  std::vector<KPlane> centers;
  std::size_t next = 0;
  while (true) {
    centers.push_back(pool[next]);
    const Mat& c = pool[next].frame();
    const double* cv = lines ? &flat[next * static_cast<std::size_t>(d)] : nullptr;
    // Fixed blocks keep the argmax independent of the thread count.
    constexpr std::int64_t kBlocks = 64;
    std::array<double, kBlocks> block_max;
    std::array<std::size_t, kBlocks> block_arg;
    auto update = [&](std::int64_t b) {
      const std::int64_t lo = n * b / kBlocks, hi = n * (b + 1) / kBlocks;
      double top = -1.0;
      std::size_t arg = 0;
      for (std::int64_t i = lo; i < hi; ++i) {
        const auto u = static_cast<std::size_t>(i);
        double dist = 0.0;
        if (lines) {
          const double* w = &flat[u * static_cast<std::size_t>(d)];
          double dot = 0.0;
          for (int a = 0; a < d; ++a) dot += cv[a] * w[a];
          dist = 1.0 - dot * dot;
        } else {
          const double m = metric_unchecked(c, pool[u].frame());
          dist = m * m;
        }
        const double g = std::min(gap[u], dist);
        gap[u] = g;
        if (g > top) {
          top = g;
          arg = u;
        }
      }
      block_max[static_cast<std::size_t>(b)] = top;
      block_arg[static_cast<std::size_t>(b)] = arg;
    };
    if (exec == Exec::serial) {
      for (std::int64_t b = 0; b < kBlocks; ++b) update(b);
    } else {
#pragma omp parallel for schedule(static)
      for (std::int64_t b = 0; b < kBlocks; ++b) update(b);
    }
    double far = -1.0;
    for (std::size_t b = 0; b < kBlocks; ++b) {
      if (block_max[b] > far) {
        far = block_max[b];
        next = block_arg[b];
      }
    }
    if (far <= stop * stop) break;
  }
  return centers;
}

std::vector<ContentPartition> build_partitions(const std::vector<KPlane>& cells, double epsilon,
                                               Exec exec) {
  std::vector<ContentPartition> out;
  const auto n = static_cast<std::int64_t>(cells.size());
  for (double radius = epsilon;; radius *= 2.0) {
    ContentPartition part;
    part.radius = radius;
    part.ball_of_cell.assign(cells.size(), std::numeric_limits<std::uint32_t>::max());
    if (radius < 2.0 * epsilon) {
      // Only a ball's own center fits: one ball per cell.
      for (std::size_t i = 0; i < cells.size(); ++i) part.ball_of_cell[i] = static_cast<std::uint32_t>(i);
      part.balls = cells.size();
    } else if (radius >= 1.0 + epsilon) {
      std::fill(part.ball_of_cell.begin(), part.ball_of_cell.end(), 0U);
      part.balls = 1;
    } else {
      auto& owner = part.ball_of_cell;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (owner[c] != std::numeric_limits<std::uint32_t>::max()) continue;
        const auto ball = static_cast<std::uint32_t>(part.balls++);
        const Mat& center = cells[c].frame();
        auto claim = [&](std::int64_t i) {
          const auto u = static_cast<std::size_t>(i);
          if (owner[u] == std::numeric_limits<std::uint32_t>::max() &&
              metric_unchecked(center, cells[u].frame()) + epsilon <= radius)
            owner[u] = ball;
        };
        const auto start = static_cast<std::int64_t>(c);
        if (exec == Exec::serial) {
          for (std::int64_t i = start; i < n; ++i) claim(i);
        } else {
#pragma omp parallel for schedule(static)
          for (std::int64_t i = start; i < n; ++i) claim(i);
        }
      }
    }
    out.push_back(std::move(part));
    if (radius >= 1.0 + epsilon) break;
  }
  return out;
}

}  // namespace

ProjectivePoint ProjectivePoint::from_vector(const Vec& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("direction of a zero or non-finite vector");
  Vec u = v / norm;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-12) {
      if (u[i] < 0) u = -u;
      break;
    }
  }
  return ProjectivePoint(std::move(u));
}

ProjectivePoint direction_of_pair(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw DomainError("points of different dimensions");
  if (x == y) throw DomainError("direction of a coincident pair");
  return ProjectivePoint::from_vector(x - y);
}

Vec unit_direction(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw DomainError("points of different dimensions");
  const Vec diff = x - y;
  const double norm = diff.norm();
  if (!(norm > 0.0)) throw DomainError("direction of a coincident pair");
  return diff / norm;
}

KPlane KPlane::from_spanning(const Mat& columns) {
  if (columns.cols() < 1 || columns.cols() > columns.rows())
    throw DomainError("spanning set must have 1..d columns");
  Eigen::ColPivHouseholderQR<Mat> pivoted(columns);
  pivoted.setThreshold(1e-12);
  if (pivoted.rank() < columns.cols()) throw DomainError("spanning columns are rank deficient");
  Eigen::HouseholderQR<Mat> qr(columns);
  const Mat q = qr.householderQ() * Mat::Identity(columns.rows(), columns.cols());
  return KPlane(q);
}

KPlane KPlane::from_frame(const Mat& frame) {
  if (frame.cols() < 1 || frame.cols() > frame.rows()) throw DomainError("frame must have 1..d columns");
  const Mat gram = frame.transpose() * frame;
  if ((gram - Mat::Identity(frame.cols(), frame.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("frame is not orthonormal");
  return KPlane(frame);
}

KPlane KPlane::line(const ProjectivePoint& direction) {
  Mat frame(direction.dim(), 1);
  frame.col(0) = direction.vector();
  return KPlane(frame);
}

Mat KPlane::complement_frame() const {
  const auto d = frame_.rows();
  const auto k = frame_.cols();
  Eigen::HouseholderQR<Mat> qr(frame_);
  const Mat q = qr.householderQ() * Mat::Identity(d, d);
  return q.rightCols(d - k);
}

double grassmann_metric(const KPlane& v, const KPlane& w) {
  require_same_shape(v, w);
  // Fixed argument order so the value is bitwise symmetric.
  const auto& a = v.frame();
  const auto& b = w.frame();
  const bool swap = std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
  return swap ? metric_unchecked(b, a) : metric_unchecked(a, b);
}

double line_plane_angle(const Vec& unit, const KPlane& plane) {
  if (unit.size() != plane.dim()) throw DomainError("line and plane dimensions differ");
  const Vec along = plane.frame().transpose() * unit;
  const double off = (unit - plane.frame() * along).norm();
  return std::atan2(off, along.norm());
}

double line_plane_angle(const ProjectivePoint& line, const KPlane& plane) {
  return line_plane_angle(line.vector(), plane);
}

double pair_angle_bound(double radius, double separation) {
  if (radius < 0.0 || !(separation > 0.0)) throw DomainError("need radius >= 0 and separation > 0");
  if (radius == 0.0) return 0.0;
  if (separation < 4.0 * radius)
    throw BoundNotApplicable("center distance " + std::to_string(separation) +
                             " is below 4r = " + std::to_string(4.0 * radius));
  return 4.0 * radius / separation;
}

double pair_angle_bound(const Ball& a, const Ball& b) {
  if (a.center.size() != b.center.size()) throw DomainError("balls of different dimensions");
  return pair_angle_bound(std::max(a.radius, b.radius), (a.center - b.center).norm());
}

KPlane random_plane(int d, int k, std::mt19937_64& rng) {
  if (d < 1 || k < 1 || k > d) throw DomainError("need 1 <= k <= d");
  std::normal_distribution<double> gauss;
  while (true) {
    Mat m(d, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < d; ++i) m(i, j) = gauss(rng);
    try {
      return KPlane::from_spanning(m);
    } catch (const DomainError&) {
      // probability zero; draw again
    }
  }
}

GrassmannNet::GrassmannNet(int d, int k, double epsilon, std::uint64_t seed,
                           std::vector<KPlane> cells, NetAudit audit, Exec exec)
    : d_(d), k_(k), epsilon_(epsilon), seed_(seed), cells_(std::move(cells)), audit_(audit) {
  if (cells_.empty()) throw DomainError("net without cells");
  for (const auto& c : cells_)
    if (c.dim() != d || c.rank() != k) throw DomainError("net cell of the wrong shape");
  partitions_ = build_partitions(cells_, epsilon_, exec);
}

double GrassmannNet::net_constant() const {
  return static_cast<double>(cells_.size()) * std::pow(epsilon_, manifold_dim());
}

GrassmannNet::Nearest GrassmannNet::nearest(const KPlane& plane) const {
  require_same_shape(cells_.front(), plane);
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const double dist = metric_unchecked(cells_[i].frame(), plane.frame());
    if (dist < best.distance) best = {i, dist};
  }
  return best;
}

NetAudit audit_net(const GrassmannNet& net, std::size_t samples, std::uint64_t seed, Exec exec) {
  const std::vector<KPlane> probes = random_planes(net.d(), net.k(), samples, seed);
  std::vector<double> dist(probes.size());
  const auto n = static_cast<std::int64_t>(probes.size());
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i)
      dist[static_cast<std::size_t>(i)] = net.nearest(probes[static_cast<std::size_t>(i)]).distance;
  } else {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i)
      dist[static_cast<std::size_t>(i)] = net.nearest(probes[static_cast<std::size_t>(i)]).distance;
  }
  NetAudit audit;
  audit.samples = samples;
  audit.attempts = 1;
  for (double v : dist) audit.max_distance = std::max(audit.max_distance, v);
  audit.passed = audit.max_distance <= net.epsilon();
  return audit;
}

GrassmannNet build_net(int d, int k, double epsilon, std::uint64_t seed, Exec exec) {
  if (d < 2 || d > 4 || k < 1 || k >= d) throw DomainError("need 2 <= d <= 4 and 1 <= k < d");
  if (k * (d - k) > 4) throw DomainError("k(d-k) must be at most 4");
  if (!(epsilon > 0.0)) throw DomainError("mesh must be positive");
  constexpr std::size_t kAuditSamples = 10000;
  if (epsilon >= 1.0) {
    // The projection metric never exceeds 1, so any single plane is a net.
    GrassmannNet probe(d, k, epsilon, seed, {coordinate_plane(d, k)}, NetAudit{}, exec);
    NetAudit audit = audit_net(probe, kAuditSamples, mix(seed ^ 0xa0d17ULL), exec);
    return GrassmannNet(d, k, epsilon, seed, {coordinate_plane(d, k)}, audit, exec);
  }
  std::size_t pool = pool_size(k * (d - k), epsilon);
  for (int attempt = 1; attempt <= 3; ++attempt) {
    const std::vector<KPlane> candidates = random_planes(d, k, pool, mix(seed + static_cast<std::uint64_t>(attempt)));
    std::vector<KPlane> cells = farthest_point_net(candidates, 0.75 * epsilon, exec);
    GrassmannNet net(d, k, epsilon, seed, std::move(cells), NetAudit{}, Exec::serial);
    NetAudit audit = audit_net(net, kAuditSamples, mix(seed ^ (0xa0d17ULL + static_cast<std::uint64_t>(attempt))), exec);
    audit.attempts = attempt;
    audit.pool_size = pool;
    if (audit.passed)
      return GrassmannNet(d, k, epsilon, seed, std::vector<KPlane>(net.cells()), audit, exec);
    pool = std::min<std::size_t>(pool * 4, 16000000);
  }
  throw MeshError("net audit failed three times at mesh " + std::to_string(epsilon));
}

double mesh_angle(double epsilon) { return std::asin(std::min(epsilon, 1.0)); }

std::vector<std::size_t> angle_neighborhood(const GrassmannNet& net, const ProjectivePoint& line,
                                            double delta, Exec exec) {
  if (delta < 0.0) throw DomainError("negative angle");
  if (line.dim() != net.d()) throw DomainError("line and net dimensions differ");
  const double limit = delta + mesh_angle(net.epsilon());
  std::vector<std::uint8_t> hit(net.size(), 0);
  const auto n = static_cast<std::int64_t>(net.size());
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i)
      hit[static_cast<std::size_t>(i)] = line_plane_angle(line, net.cell(static_cast<std::size_t>(i))) <= limit;
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
      hit[static_cast<std::size_t>(i)] = line_plane_angle(line, net.cell(static_cast<std::size_t>(i))) <= limit;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < hit.size(); ++i)
    if (hit[i]) out.push_back(i);
  return out;
}

double content_estimate(const GrassmannNet& net, std::span<const std::size_t> cells, double w) {
  if (!(w > 0.0)) throw DomainError("content exponent must be positive");
  if (cells.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& part : net.partitions()) {
    std::vector<std::uint8_t> used(part.balls, 0);
    std::size_t count = 0;
    for (std::size_t c : cells) {
      if (c >= net.size()) throw DomainError("cell id out of range");
      auto& u = used[part.ball_of_cell[c]];
      if (!u) {
        u = 1;
        ++count;
      }
    }
    const double diameter = std::min(2.0 * part.radius, 1.0);
    best = std::min(best, static_cast<double>(count) * std::pow(diameter, w));
  }
  return best;
}

std::vector<std::size_t> CellFlags::ids() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < flags_.size(); ++i)
    if (test(i)) out.push_back(i);
  return out;
}

}  // namespace holdercover
