#pragma once

#include "holdercover/exec.hpp"
#include "holdercover/linalg.hpp"

#include <atomic>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace holdercover {

/// A line through the origin: unit vector with its first nonzero coordinate positive.
class ProjectivePoint {
 public:
  /// Normalizes and canonicalizes; throws DomainError on the zero vector.
  static ProjectivePoint from_vector(const Vec& v);

  const Vec& vector() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }

 private:
  explicit ProjectivePoint(Vec v) : v_(std::move(v)) {}
  Vec v_;
};

/// Canonical projective direction of x - y. Throws DomainError if x == y.
ProjectivePoint direction_of_pair(const Vec& x, const Vec& y);

/// Ordered unit vector (x - y) / |x - y| on the sphere.
Vec unit_direction(const Vec& x, const Vec& y);

/// A k-plane in R^d held as a d x k orthonormal frame.
class KPlane {
 public:
  /// Orthonormalizes the columns (Householder QR). Throws DomainError when the
  /// columns are rank deficient.
  static KPlane from_spanning(const Mat& columns);
  /// Accepts a frame already orthonormal to 1e-10; throws DomainError otherwise.
  static KPlane from_frame(const Mat& frame);
  static KPlane line(const ProjectivePoint& direction);

  const Mat& frame() const { return frame_; }
  int dim() const { return static_cast<int>(frame_.rows()); }
  int rank() const { return static_cast<int>(frame_.cols()); }

  Mat projector() const { return frame_ * frame_.transpose(); }
  /// Orthonormal d x (d-k) frame of the orthogonal complement.
  Mat complement_frame() const;
  /// (I - P_V) v: the component of v orthogonal to the plane.
  Vec reject(const Vec& v) const { return v - frame_ * (frame_.transpose() * v); }

 private:
  explicit KPlane(Mat frame) : frame_(std::move(frame)) {}
  Mat frame_;
};

/// Operator norm of P_V - P_W, computed as the sine of the largest principal angle.
double grassmann_metric(const KPlane& v, const KPlane& w);

/// Smallest angle between the line and a nonzero vector of the plane, in [0, pi/2].
double line_plane_angle(const ProjectivePoint& line, const KPlane& plane);
double line_plane_angle(const Vec& unit, const KPlane& plane);

/// Sound bound 4r/R on the angle between any direction joining two radius-r balls
/// and their center line, valid for R >= 4r (throws BoundNotApplicable otherwise).
double pair_angle_bound(double radius, double separation);

struct Ball {
  Vec center;
  double radius = 0.0;
};
/// Same bound with R the center distance and r the larger radius.
double pair_angle_bound(const Ball& a, const Ball& b);

/// Haar-distributed k-plane (QR of a Gaussian matrix).
KPlane random_plane(int d, int k, std::mt19937_64& rng);

struct NetAudit {
  std::size_t samples = 0;
  double max_distance = 0.0;  // worst nearest-center distance over the audit sample
  bool passed = false;
  int attempts = 0;
  std::size_t pool_size = 0;
};

/// For one cover radius: which ball of a fixed greedy cover each cell falls into.
struct ContentPartition {
  double radius = 0.0;
  std::size_t balls = 0;
  std::vector<std::uint32_t> ball_of_cell;
};

/// Finite epsilon-net of G(d,k) under the projection metric.
class GrassmannNet {
 public:
  GrassmannNet(int d, int k, double epsilon, std::uint64_t seed, std::vector<KPlane> cells,
               NetAudit audit, Exec exec = Exec::parallel);

  int d() const { return d_; }
  int k() const { return k_; }
  double epsilon() const { return epsilon_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return cells_.size(); }
  const KPlane& cell(std::size_t i) const { return cells_[i]; }
  const std::vector<KPlane>& cells() const { return cells_; }
  const NetAudit& audit() const { return audit_; }
  /// cells * epsilon^(k(d-k)).
  double net_constant() const;
  int manifold_dim() const { return k_ * (d_ - k_); }

  struct Nearest {
    std::size_t cell = 0;
    double distance = 0.0;
  };
  Nearest nearest(const KPlane& plane) const;

  const std::vector<ContentPartition>& partitions() const { return partitions_; }

 private:
  int d_;
  int k_;
  double epsilon_;
  std::uint64_t seed_;
  std::vector<KPlane> cells_;
  NetAudit audit_;
  std::vector<ContentPartition> partitions_;
};

/// Greedy farthest-point net from a seeded random pool, audited on 10^4 fresh
/// planes; the pool grows 4x on audit failure and MeshError follows the third.
GrassmannNet build_net(int d, int k, double epsilon, std::uint64_t seed,
                       Exec exec = Exec::parallel);

/// Audits covering radius <= epsilon on `samples` fresh random planes.
NetAudit audit_net(const GrassmannNet& net, std::size_t samples, std::uint64_t seed,
                   Exec exec = Exec::parallel);

/// Angle inflation that keeps angle_neighborhood an outer cover: arcsin(min(eps, 1)).
double mesh_angle(double epsilon);

/// Cells whose center makes angle <= delta + mesh_angle(eps) with the line. Sorted.
std::vector<std::size_t> angle_neighborhood(const GrassmannNet& net, const ProjectivePoint& line,
                                            double delta, Exec exec = Exec::parallel);

/// Upper estimate of the w-dimensional Hausdorff content of the union of the cells
/// (each cell standing for its epsilon-ball): the minimum over radii eps * 2^j of
/// (balls needed) * min(2 radius, 1)^w. Monotone in the cell set.
double content_estimate(const GrassmannNet& net, std::span<const std::size_t> cells, double w);

/// Per-cell idempotent flags; set() is safe from concurrent writers.
class CellFlags {
 public:
  explicit CellFlags(std::size_t n) : flags_(n) {}
  void set(std::size_t i) { flags_[i].store(1, std::memory_order_relaxed); }
  bool test(std::size_t i) const { return flags_[i].load(std::memory_order_relaxed) != 0; }
  std::size_t size() const { return flags_.size(); }
  std::vector<std::size_t> ids() const;

 private:
  std::vector<std::atomic<std::uint8_t>> flags_;
};

}  // namespace holdercover
