#include "holdercover/lattice.hpp"

#include "holdercover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace holdercover {
namespace {

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  std::uint64_t value = 1;
  for (int i = 0; i < exponent; ++i) {
    if (value > std::numeric_limits<std::uint64_t>::max() / base)
      throw PrecisionError("base^" + std::to_string(exponent) + " overflows 64 bits");
    value *= base;
  }
  return value;
}

// Writes the level-n cube of point i into `out`.
LatticeCube cube_of_point(const PointSample& sample, std::size_t i, int level,
                          std::uint64_t divisor, std::int64_t last) {
  LatticeCube cube;
  cube.base = sample.base();
  cube.level = level;
  cube.dim = sample.dim();
  for (int a = 0; a < sample.dim(); ++a) {
    auto k = static_cast<std::int64_t>(sample.numerator(i, a) / divisor);
    cube.coords[static_cast<std::size_t>(a)] = std::min(k, last);
  }
  return cube;
}

// Exponent k with q == base^k, or -1.
int power_of(const BigInt& q, int base) {
  BigInt v = q;
  int k = 0;
  while (v > 1 && v % base == 0) {
    v /= base;
    ++k;
  }
  return v == 1 ? k : -1;
}

struct CantorDigits {
  int base = 2;
  int precision = 0;
  std::vector<std::uint64_t> endpoints;  // numerators over base^precision
};

// Left endpoints of the 2^depth retained intervals of the middle Cantor set with
// contraction a/q, q = base^k.
CantorDigits cantor_endpoints(const Rational& ratio, int depth) {
  if (ratio <= 0 || ratio > Rational(1, 2))
    throw DomainError("ratio " + to_string(ratio) + " outside (0, 1/2]");
  if (depth < 0) throw DomainError("negative depth");
  const BigInt q = denominator(ratio);
  const BigInt a = numerator(ratio);
  CantorDigits out;
  int k = power_of(q, 2);
  out.base = 2;
  if (k < 0) {
    k = power_of(q, 3);
    out.base = 3;
  }
  if (k < 0)
    throw DomainError("ratio denominator " + q.str() + " is not a power of 2 or 3");
  out.precision = k * depth;
  if (out.precision > PointSample::precision_budget(out.base))
    throw PrecisionError("depth " + std::to_string(depth) + " needs base-" +
                         std::to_string(out.base) + " precision " +
                         std::to_string(out.precision) + " beyond the 64-bit budget");
  const auto qq = q.convert_to<std::uint64_t>();
  const auto aa = a.convert_to<std::uint64_t>();
  // offset_i = (q - a) a^(i-1) q^(depth-i) for the i-th digit.
  std::vector<std::uint64_t> offsets(static_cast<std::size_t>(depth));
  for (int i = 1; i <= depth; ++i) {
    std::uint64_t v = qq - aa;
    for (int e = 1; e < i; ++e) v *= aa;
    for (int e = i; e < depth; ++e) v *= qq;
    offsets[static_cast<std::size_t>(i - 1)] = v;
  }
  const std::size_t n = std::size_t{1} << depth;
  out.endpoints.resize(n);
  for (std::size_t path = 0; path < n; ++path) {
    std::uint64_t x = 0;
    for (int i = 0; i < depth; ++i)
      if ((path >> (depth - 1 - i)) & 1U) x += offsets[static_cast<std::size_t>(i)];
    out.endpoints[path] = x;
  }
  return out;
}

Vec dense_unit_vector(int dim, int j) {
  // Golden-ratio rotation on the circle; R2 low-discrepancy pairs on the sphere.
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  Vec e(dim);
  if (dim == 2) {
    const double frac = std::fmod(j * golden, 1.0);
    const double theta = 2.0 * std::numbers::pi * frac;
    e << std::cos(theta), std::sin(theta);
  } else {
    const double a1 = 0.7548776662466927;
    const double a2 = 0.5698402909980532;
    const double z = 2.0 * std::fmod(0.5 + j * a1, 1.0) - 1.0;
    const double phi = 2.0 * std::numbers::pi * std::fmod(0.5 + j * a2, 1.0);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    e << rho * std::cos(phi), rho * std::sin(phi), z;
  }
  return e;
}

}  // namespace

double LatticeCube::side() const { return std::pow(static_cast<double>(base), -level); }

Vec LatticeCube::center() const {
  const double s = side();
  Vec c(dim);
  for (int a = 0; a < dim; ++a) c[a] = (static_cast<double>(coords[static_cast<std::size_t>(a)]) + 0.5) * s;
  return c;
}

double LatticeCube::circumradius() const { return 0.5 * side() * std::sqrt(static_cast<double>(dim)); }

LatticeCube LatticeCube::ancestor(int coarser) const {
  if (coarser > level || coarser < 0) throw DomainError("ancestor level out of range");
  LatticeCube up = *this;
  up.level = coarser;
  std::int64_t scale = 1;
  for (int i = coarser; i < level; ++i) scale *= base;
  for (int a = 0; a < dim; ++a) up.coords[static_cast<std::size_t>(a)] /= scale;
  return up;
}

bool LatticeCube::contains(const LatticeCube& finer) const {
  return finer.base == base && finer.dim == dim && finer.level >= level &&
         finer.ancestor(level) == *this;
}

PointSample::PointSample(int base, int dim, int precision, std::vector<std::uint64_t> numerators)
    : base_(base),
      dim_(dim),
      precision_(precision),
      denominator_(checked_pow(static_cast<std::uint64_t>(base), precision)),
      numerators_(std::move(numerators)) {}

PointSample PointSample::from_numerators(int base, int dim, int precision,
                                         std::vector<std::uint64_t> numerators) {
  if (base != 2 && base != 3) throw DomainError("base must be 2 or 3");
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in 1..4");
  if (precision < 0 || precision > precision_budget(base))
    throw PrecisionError("precision " + std::to_string(precision) + " beyond the 64-bit budget");
  if (numerators.empty()) throw DomainError("empty point sample");
  if (numerators.size() % static_cast<std::size_t>(dim) != 0)
    throw DomainError("numerator count is not a multiple of the dimension");
  const std::uint64_t den = checked_pow(static_cast<std::uint64_t>(base), precision);
  for (auto v : numerators)
    if (v > den) throw DomainError("coordinate outside [0,1]");
  return PointSample(base, dim, precision, std::move(numerators));
}

int PointSample::precision_budget(int base) {
  int p = 0;
  std::uint64_t v = 1;
  const auto b = static_cast<std::uint64_t>(base);
  while (v <= std::numeric_limits<std::uint64_t>::max() / b) {
    v *= b;
    ++p;
  }
  return p;
}

double PointSample::coord(std::size_t i, int axis) const {
  return static_cast<double>(numerator(i, axis)) / static_cast<double>(denominator_);
}

Vec PointSample::point(std::size_t i) const {
  Vec x(dim_);
  for (int a = 0; a < dim_; ++a) x[a] = coord(i, a);
  return x;
}

std::vector<Vec> PointSample::points() const {
  std::vector<Vec> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
  return out;
}

std::vector<LatticeCube> cover_at_scale(const PointSample& sample, int base, int level, Exec exec) {
  if (level < 0) throw DomainError("negative level");
  if (base != sample.base())
    throw PrecisionError("cube base " + std::to_string(base) + " differs from the sample base " +
                         std::to_string(sample.base()) + "; membership would be inexact");
  if (level > sample.precision())
    throw PrecisionError("level " + std::to_string(level) + " exceeds the sample precision " +
                         std::to_string(sample.precision()));
  const std::uint64_t divisor =
      checked_pow(static_cast<std::uint64_t>(base), sample.precision() - level);
  const auto last = static_cast<std::int64_t>(checked_pow(static_cast<std::uint64_t>(base), level)) - 1;
  const auto n = static_cast<std::int64_t>(sample.size());
  std::vector<LatticeCube> cubes(static_cast<std::size_t>(n));
  if (exec == Exec::serial) {
    for (std::int64_t i = 0; i < n; ++i)
      cubes[static_cast<std::size_t>(i)] = cube_of_point(sample, static_cast<std::size_t>(i), level, divisor, last);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
      cubes[static_cast<std::size_t>(i)] = cube_of_point(sample, static_cast<std::size_t>(i), level, divisor, last);
  }
  std::sort(cubes.begin(), cubes.end());
  cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
  return cubes;
}

std::size_t ScaleCover::count(int level) const {
  auto it = families.find(level);
  return it == families.end() ? 0 : it->second.size();
}

std::vector<std::pair<int, std::size_t>> ScaleCover::counts() const {
  std::vector<std::pair<int, std::size_t>> out;
  for (const auto& [level, cubes] : families) out.emplace_back(level, cubes.size());
  return out;
}

ScaleCover build_scale_cover(const PointSample& sample, int min_level, int max_level, Exec exec) {
  if (min_level < 0 || max_level < min_level) throw DomainError("bad level range");
  ScaleCover cover;
  cover.base = sample.base();
  cover.dim = sample.dim();
  for (int n = min_level; n <= max_level; ++n)
    cover.families[n] = cover_at_scale(sample, sample.base(), n, exec);
  return cover;
}

BoxDimensionEstimate box_dimension_estimate(const ScaleCover& cover, int first_level,
                                            int last_level) {
  if (last_level - first_level + 1 < 3) throw DomainError("window needs at least 3 levels");
  std::vector<double> x, y;
  const double log_base = std::log(static_cast<double>(cover.base));
  for (int n = first_level; n <= last_level; ++n) {
    const std::size_t count = cover.count(n);
    if (count == 0)
      throw DomainError("window level " + std::to_string(n) + " has no cubes in the cover");
    x.push_back(n * log_base);
    y.push_back(std::log(static_cast<double>(count)));
  }
  const LinearFit fit = least_squares(x, y);
  BoxDimensionEstimate est;
  est.slope = fit.slope;
  est.residual = fit.residual;
  est.fitted_constant = std::exp(fit.intercept);
  est.degenerate = fit.degenerate;
  est.first_level = first_level;
  est.last_level = last_level;
  return est;
}

SetSpec SetSpec::parse(const std::string& text, int depth) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw DomainError("empty set spec");
  auto need = [&](std::size_t n) {
    if (parts.size() != n) throw DomainError("set spec '" + text + "' has the wrong arity");
  };
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) throw DomainError("");
      return v;
    } catch (const std::exception&) {
      throw DomainError("set spec '" + text + "': '" + s + "' is not an integer");
    }
  };
  SetSpec spec;
  spec.depth = depth;
  const std::string& kind = parts[0];
  if (kind == "cantor1d") {
    need(2);
    spec.kind = SetKind::cantor1d;
    spec.dim = 1;
    spec.ratio = parse_rational(parts[1]);
  } else if (kind == "corner_dust") {
    need(3);
    spec.kind = SetKind::corner_dust;
    spec.dim = to_int(parts[1]);
    spec.ratio = parse_rational(parts[2]);
  } else if (kind == "dense_direction" || kind == "dense_direction_countable") {
    need(3);
    spec.kind = SetKind::dense_direction_countable;
    spec.dim = to_int(parts[1]);
    spec.count = to_int(parts[2]);
  } else if (kind == "grid") {
    need(3);
    spec.kind = SetKind::grid;
    spec.dim = to_int(parts[1]);
    spec.count = to_int(parts[2]);
  } else {
    throw DomainError("unknown set kind '" + kind + "'");
  }
  return spec;
}

std::string SetSpec::to_string() const {
  switch (kind) {
    case SetKind::cantor1d:
      return "cantor1d:" + holdercover::to_string(ratio);
    case SetKind::corner_dust:
      return "corner_dust:" + std::to_string(dim) + ":" + holdercover::to_string(ratio);
    case SetKind::dense_direction_countable:
      return "dense_direction:" + std::to_string(dim) + ":" + std::to_string(count);
    case SetKind::grid:
      return "grid:" + std::to_string(dim) + ":" + std::to_string(count);
  }
  return {};
}

PointSample generate_standard_set(const SetSpec& spec) {
  switch (spec.kind) {
    case SetKind::cantor1d:
      return cantor_set(spec.ratio, spec.depth);
    case SetKind::corner_dust:
      return corner_dust(spec.dim, spec.ratio, spec.depth);
    case SetKind::dense_direction_countable:
      return dense_direction_countable(spec.dim, spec.count);
    case SetKind::grid:
      return dyadic_grid(spec.dim, spec.count);
  }
  throw DomainError("unknown set kind");
}

PointSample cantor_set(const Rational& ratio, int depth) {
  CantorDigits c = cantor_endpoints(ratio, depth);
  return PointSample::from_numerators(c.base, 1, c.precision, std::move(c.endpoints));
}

PointSample corner_dust(int dim, const Rational& ratio, int depth) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in 1..4");
  CantorDigits c = cantor_endpoints(ratio, depth);
  const std::size_t per_axis = c.endpoints.size();
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    if (total > (std::size_t{1} << 26) / per_axis) throw DomainError("corner dust too large");
    total *= per_axis;
  }
  std::vector<std::uint64_t> nums;
  nums.reserve(total * static_cast<std::size_t>(dim));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    std::vector<std::uint64_t> point(static_cast<std::size_t>(dim));
    for (int a = dim - 1; a >= 0; --a) {
      point[static_cast<std::size_t>(a)] = c.endpoints[rem % per_axis];
      rem /= per_axis;
    }
    nums.insert(nums.end(), point.begin(), point.end());
  }
  return PointSample::from_numerators(c.base, dim, c.precision, std::move(nums));
}

PointSample dense_direction_countable(int dim, int count) {
  if (dim != 2 && dim != 3) throw DomainError("dense_direction_countable supports d = 2, 3");
  constexpr int kPrecision = 40;
  if (count < 0 || count > 30) throw DomainError("J must be in 0..30");
  const double scale = std::ldexp(1.0, kPrecision);
  std::vector<std::uint64_t> nums;
  auto push = [&](const Vec& x) {
    for (int a = 0; a < dim; ++a) nums.push_back(static_cast<std::uint64_t>(std::llround(x[a] * scale)));
  };
  const Vec center = Vec::Constant(dim, 0.5);
  push(center);
  for (int j = 1; j <= count; ++j) push(center + std::ldexp(1.0, -(j + 1)) * dense_unit_vector(dim, j));
  return PointSample::from_numerators(2, dim, kPrecision, std::move(nums));
}

PointSample dyadic_grid(int dim, int level) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in 1..4");
  if (level < 0 || level * dim > 24) throw DomainError("grid too large");
  const std::uint64_t side = std::uint64_t{1} << level;
  std::uint64_t total = 1;
  for (int a = 0; a < dim; ++a) total *= side;
  std::vector<std::uint64_t> nums;
  nums.reserve(total * static_cast<std::uint64_t>(dim));
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rem = idx;
    std::vector<std::uint64_t> point(static_cast<std::size_t>(dim));
    for (int a = dim - 1; a >= 0; --a) {
      point[static_cast<std::size_t>(a)] = rem % side;
      rem /= side;
    }
    nums.insert(nums.end(), point.begin(), point.end());
  }
  return PointSample::from_numerators(2, dim, level, std::move(nums));
}

}  // namespace holdercover
