#include "holdercover/cover.hpp"

#include "holdercover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace holdercover {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// n with 2^-n <= x < 2 * 2^-n, for x > 0.
int dyadic_level(double x) {
  int e = 0;
  std::frexp(x, &e);
  return 1 - e;
}

std::vector<CubePair> pairs_of(const std::vector<LatticeCube>& cubes, double threshold, Exec exec) {
  const auto n = static_cast<std::int64_t>(cubes.size());
  std::vector<Vec> centers(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) centers[i] = cubes[i].center();
  const double diameter = cubes.empty() ? 0.0 : 2.0 * cubes.front().circumradius();
  std::vector<std::vector<CubePair>> rows(cubes.size());
  auto scan = [&](std::int64_t i) {
    const auto a = static_cast<std::size_t>(i);
    auto& row = rows[a];
    for (std::size_t b = a + 1; b < cubes.size(); ++b) {
      const double dist = (centers[a] - centers[b]).norm();
      const double sep = dist - diameter;
      if (sep >= threshold) row.push_back({a, b, dist, sep});
    }
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  }
  std::vector<CubePair> out;
  for (auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<std::size_t> union_sorted(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct RowResult {
  std::map<int, ScaleRecord> per_scale;
  std::optional<CertificateViolation> first;
  std::size_t pairs = 0;
  double small_constant = 0.0;
};

}  // namespace

void CoverParams::validate() const {
  if (d < 2 || d > kMaxDim) throw DomainError("d must be in 2..4");
  if (k < 1 || k >= d) throw DomainError("k must be in 1..d-1");
  const double half = 0.5 * (d - k);
  if (!(t > 0.0) || !(t < half))
    throw DomainError("t = " + fmt(t) + " must lie in (0, " + fmt(half) + ")");
  const double top = static_cast<double>(k * (d - k));
  if (!(w > g() + 2.0 * t) || !(w < top))
    throw DomainError("w = " + fmt(w) + " must lie in (" + fmt(g() + 2.0 * t) + ", " + fmt(top) + ")");
  if (n0 < 0 || nmax < n0) throw DomainError("need 0 <= n0 <= nmax");
  const double a = alpha();
  if (!(a > 0.0 && a < 1.0)) throw DomainError("Hölder exponent outside (0,1)");
}

double separation_threshold(const CoverParams& params, int level) {
  return 2.0 * std::exp2(-params.alpha() * level);
}

std::vector<PairFamily> build_pair_families(const ScaleCover& cover, const CoverParams& params,
                                            Exec exec) {
  params.validate();
  if (cover.dim != params.d) throw DomainError("cover dimension differs from params.d");
  std::vector<PairFamily> out;
  for (int n = params.n0; n <= params.nmax; ++n) {
    PairFamily fam;
    fam.level = n;
    fam.threshold = separation_threshold(params, n);
    auto it = cover.families.find(n);
    if (it == cover.families.end() || it->second.empty()) {
      fam.empty_level = true;
    } else {
      fam.cubes = it->second;
      fam.pairs = pairs_of(fam.cubes, fam.threshold, exec);
    }
    out.push_back(std::move(fam));
  }
  return out;
}

double doubled_radius(int level) { return 2.0 * std::exp2(-level); }

bool ExceptionalReport::flags(const GrassmannNet& net, const KPlane& plane) const {
  const std::size_t cell = net.nearest(plane).cell;
  return std::any_of(levels.begin(), levels.end(), [&](const ExceptionalLevel& lv) {
    return std::binary_search(lv.cells.begin(), lv.cells.end(), cell);
  });
}

ExceptionalReport accumulate_exceptional(const std::vector<PairFamily>& families,
                                         const GrassmannNet& net, const CoverParams& params,
                                         Exec exec) {
  params.validate();
  if (net.d() != params.d || net.k() != params.k) throw DomainError("net shape differs from params");

  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& fam : families) {
    const double r = doubled_radius(fam.level);
    for (const auto& p : fam.pairs)
      if (p.center_distance >= 4.0 * r) smallest = std::min(smallest, 4.0 * r / p.center_distance);
  }
  if (net.epsilon() > smallest)
    throw MeshError("net mesh " + fmt(net.epsilon()) + " exceeds the smallest angle " + fmt(smallest));

  ExceptionalReport report;
  for (const auto& fam : families) {
    ExceptionalLevel lv;
    lv.level = fam.level;
    lv.pairs = fam.pairs.size();
    const double r = doubled_radius(fam.level);
    CellFlags hit(net.size());
    bool everything = false;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : fam.pairs) {
      if (p.center_distance < 4.0 * r) {
        everything = true;
        continue;
      }
      const double delta = 4.0 * r / p.center_distance;
      lo = std::min(lo, delta);
      hi = std::max(hi, delta);
    }
    if (everything) {
      for (std::size_t c = 0; c < net.size(); ++c) hit.set(c);
    } else {
      const auto m = static_cast<std::int64_t>(fam.pairs.size());
      auto flag = [&](std::int64_t i) {
        const auto& p = fam.pairs[static_cast<std::size_t>(i)];
        const ProjectivePoint line =
            direction_of_pair(fam.cubes[p.first].center(), fam.cubes[p.second].center());
        for (std::size_t c : angle_neighborhood(net, line, 4.0 * r / p.center_distance, Exec::serial))
          hit.set(c);
      };
      if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < m; ++i) flag(i);
      } else {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t i = 0; i < m; ++i) flag(i);
      }
    }
    lv.cells = hit.ids();
    lv.content = content_estimate(net, lv.cells, params.w);
    lv.min_delta = std::isfinite(lo) ? lo : 0.0;
    lv.max_delta = hi;
    report.levels.push_back(std::move(lv));
  }

  std::vector<std::size_t> tail;
  for (auto it = report.levels.rbegin(); it != report.levels.rend(); ++it) {
    tail = union_sorted(tail, it->cells);
    it->tail_content = content_estimate(net, tail, params.w);
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

HolderCertificate injectivity_certificate(const PointSample& sample, const KPlane& plane,
                                          const CoverParams& params,
                                          const ExceptionalReport* flagged,
                                          const GrassmannNet* net, Exec exec) {
  params.validate();
  if (sample.dim() != params.d || plane.dim() != params.d || plane.rank() != params.k)
    throw DomainError("sample, plane and params disagree on shape");
  if (flagged && net && flagged->flags(*net, plane))
    throw DomainError("plane lies in a flagged cell of the exceptional set");

  const double alpha = params.alpha();
  const std::vector<Vec> pts = sample.points();
  const auto n = static_cast<std::int64_t>(pts.size());
  std::vector<RowResult> rows(pts.size());

  auto scan = [&](std::int64_t ii) {
    const auto i = static_cast<std::size_t>(ii);
    RowResult& row = rows[i];
    auto fail = [&](const CertificateViolation& v) {
      if (!row.first) row.first = v;
    };
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec diff = pts[i] - pts[j];
      const double dist = diff.norm();
      const double proj = plane.reject(diff).norm();
      ++row.pairs;

      // Smallest level whose separation requirement applies to this pair.
      std::optional<int> sep_level;
      for (int m = params.n0; m <= params.nmax; ++m) {
        if (dist >= 3.0 * std::exp2(-alpha * m)) {
          sep_level = m;
          break;
        }
      }

      if (proj <= 1e-12 * std::max(1.0, dist)) {
        fail({CertificateViolation::Kind::collision, i, j, dist, proj, sep_level.value_or(-1)});
        if (sep_level) {
          ++row.per_scale[*sep_level].pairs;
          ++row.per_scale[*sep_level].violations;
        }
        continue;
      }
      if (sep_level) {
        auto& rec = row.per_scale[*sep_level];
        ++rec.pairs;
        if (proj < 2.0 * std::exp2(-*sep_level)) {
          ++rec.violations;
          fail({CertificateViolation::Kind::separation, i, j, dist, proj, *sep_level});
        }
      }
      const int level = dyadic_level(proj);
      if (level >= params.n0) {
        const double ratio = dist / std::pow(proj, alpha);
        auto& rec = row.per_scale[level];
        ++rec.pairs;
        if (ratio > 3.0) {
          ++rec.violations;
          fail({CertificateViolation::Kind::holder, i, j, dist, proj, level});
        }
        if (proj < std::exp2(-params.n0)) row.small_constant = std::max(row.small_constant, ratio);
      }
    }
  };
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) scan(i);
  }

  HolderCertificate cert{plane, params, alpha, 3.0, 0, false, std::nullopt, {}, 0.0};
  for (const auto& row : rows) {
    cert.pairs_checked += row.pairs;
    if (row.first && !cert.violation) cert.violation = row.first;
    for (const auto& [level, rec] : row.per_scale) {
      cert.per_scale[level].pairs += rec.pairs;
      cert.per_scale[level].violations += rec.violations;
    }
    cert.measured_small_constant = std::max(cert.measured_small_constant, row.small_constant);
  }
  cert.passed = !cert.violation.has_value();
  return cert;
}

}  // namespace holdercover
