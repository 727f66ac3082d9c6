#pragma once

#include "holdercover/directions.hpp"
#include "holdercover/exec.hpp"
#include "holdercover/lattice.hpp"
#include "holdercover/linalg.hpp"
#include "holdercover/stats.hpp"

#include <map>
#include <optional>
#include <vector>

namespace holdercover {

/// Parameters of the Hölder cover pipeline for A in R^d and k-planes V.
struct CoverParams {
  int d = 2;
  int k = 1;
  double t = 0.0;  // dimension bound, box dim(A) < t < (d-k)/2
  double w = 0.0;  // content exponent, (k-1)(d-k) + 2t < w < k(d-k)
  int n0 = 0;
  int nmax = 0;

  /// (k-1)(d-k), the dimension of G(d-1, k-1).
  double g() const { return static_cast<double>((k - 1) * (d - k)); }
  /// Hölder exponent 1 - 2t / (w - g).
  double alpha() const { return 1.0 - 2.0 * t / (w - g()); }

  /// Throws DomainError unless the parameter constraints hold.
  void validate() const;
  /// Whether a measured box-dimension estimate is below t.
  bool dimension_hypothesis_holds(double box_dimension) const { return box_dimension < t; }
};

/// 2 * 2^(-alpha n): the minimum separation of cube pairs at level n.
double separation_threshold(const CoverParams& params, int level);

struct CubePair {
  std::size_t first = 0;   // index into PairFamily::cubes
  std::size_t second = 0;  // first < second
  double center_distance = 0.0;
  /// Center distance minus both circumradii: a lower bound for the set distance.
  double separation = 0.0;
};

struct PairFamily {
  int level = 0;
  double threshold = 0.0;
  std::vector<LatticeCube> cubes;
  std::vector<CubePair> pairs;
  bool empty_level = false;  // the cover had no cubes at this level
};

/// Per level in [n0, nmax], all unordered cube pairs meeting the separation threshold.
std::vector<PairFamily> build_pair_families(const ScaleCover& cover, const CoverParams& params,
                                            Exec exec = Exec::parallel);

struct ExceptionalLevel {
  int level = 0;
  std::size_t pairs = 0;
  std::vector<std::size_t> cells;  // flagged net cells, sorted
  double content = 0.0;            // content_estimate of this level's cells
  double tail_content = 0.0;       // content_estimate of the union over levels >= this one
  double min_delta = 0.0;
  double max_delta = 0.0;
};

struct ExceptionalReport {
  std::vector<ExceptionalLevel> levels;
  /// log2(content) against level over levels with nonzero content.
  std::optional<LinearFit> decay;
  /// Every level's content was zero (no pair met its separation threshold).
  bool vacuous = true;

  /// Whether the plane's nearest net cell is flagged at any level.
  bool flags(const GrassmannNet& net, const KPlane& plane) const;
};

/// Doubled-cube radius r = 2 * 2^-n used for the angle bound of level-n pairs.
double doubled_radius(int level);

/// Flags M_n = union of angle neighborhoods of delta = 4r/R around each pair's
/// center line (all cells when R < 4r). Throws MeshError when the net mesh exceeds
/// the smallest delta used.
ExceptionalReport accumulate_exceptional(const std::vector<PairFamily>& families,
                                         const GrassmannNet& net, const CoverParams& params,
                                         Exec exec = Exec::parallel);

struct CertificateViolation {
  enum class Kind { collision, separation, holder };
  Kind kind = Kind::holder;
  std::size_t first = 0;
  std::size_t second = 0;
  double distance = 0.0;   // |x - x'|
  double projected = 0.0;  // |P(x) - P(x')|
  int level = 0;
};

struct ScaleRecord {
  std::size_t pairs = 0;
  std::size_t violations = 0;
};

struct HolderCertificate {
  KPlane plane;
  CoverParams params;
  double alpha = 0.0;
  double constant = 3.0;
  std::size_t pairs_checked = 0;
  bool passed = false;
  std::optional<CertificateViolation> violation;  // first in lexicographic pair order
  std::map<int, ScaleRecord> per_scale;
  /// max |x - x'| / |P(x) - P(x')|^alpha over pairs with |P(x) - P(x')| < 2^-n0.
  double measured_small_constant = 0.0;
};

/// Checks, over every sample pair, the separation implication at levels [n0, nmax]
/// and the Hölder bound |x - x'| <= 3 |P(x) - P(x')|^alpha at every level n >= n0,
/// where P projects onto the orthogonal complement of V. When `flagged` and `net`
/// are supplied a flagged plane is rejected with DomainError.
HolderCertificate injectivity_certificate(const PointSample& sample, const KPlane& plane,
                                          const CoverParams& params,
                                          const ExceptionalReport* flagged = nullptr,
                                          const GrassmannNet* net = nullptr,
                                          Exec exec = Exec::parallel);

/// Partial map from P(A) (coordinates in a basis of V-perp) to V (frame coordinates).
struct GraphMap {
  std::vector<Vec> keys;
  std::vector<Vec> values;
  std::size_t size() const { return keys.size(); }
};

/// Throws CollisionError when two keys coincide to 1e-12.
GraphMap build_graph_function(const PointSample& sample, const KPlane& plane);
GraphMap build_graph_function(const std::vector<Vec>& points, const KPlane& plane);

/// Per value component: max |f_i(u) - f_i(u')| / |u - u'|^alpha. Zero for a singleton.
Vec holder_constants(const GraphMap& f, double alpha);
/// Max-norm version: the largest component constant.
double holder_constant(const GraphMap& f, double alpha);

/// Componentwise infimal convolution f~_i(y) = min_z f_i(z) + C_i |y - z|^alpha.
class HolderExtension {
 public:
  /// Throws DomainError if some C_i is below the measured constant.
  HolderExtension(GraphMap f, double alpha, Vec constants);
  HolderExtension(GraphMap f, double alpha, double constant);

  Vec operator()(const Vec& y) const;
  double alpha() const { return alpha_; }
  const Vec& constants() const { return constants_; }
  const GraphMap& map() const { return f_; }

 private:
  GraphMap f_;
  double alpha_;
  Vec constants_;
};

struct ConeResult {
  bool lipschitz = false;
  double constant = 0.0;   // Lipschitz constant of the graph map when lipschitz
  double min_angle = 0.0;  // smallest pair-direction angle with V
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// If every pair direction makes angle >= eps with V the graph map is Lipschitz with
/// constant <= cot(eps); otherwise the first offending pair is returned.
ConeResult lipschitz_from_cone(const PointSample& sample, const KPlane& plane, double eps);

/// First pair (lexicographic) with |P(x)-P(y)| < 1 and |x-y| > N |P(x)-P(y)|^(1/N),
/// P the projection onto the orthogonal complement of V.
std::optional<std::pair<std::size_t, std::size_t>> en_witness(const PointSample& sample,
                                                              const KPlane& plane, int n);

}  // namespace holdercover
