#include "holdercover/doubling.hpp"

#include "holdercover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace holdercover {
namespace {

int digit_of(char c) {
  if (c < '0' || c > '2') throw DomainError(std::string("invalid ternary digit '") + c + "'");
  return c - '0';
}

std::int64_t pow3(int e) {
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) v *= 3;
  return v;
}

template <class Int>
struct MassTable {
  std::int64_t cells = 0;   // 3^depth
  Int total{};              // mass of [0,1] in table units
  std::vector<Int> prefix;  // prefix[i] = mass of [0, i 3^-depth]

  // Mass of [0, i 3^-depth] for the periodic extension, any integer i.
  Int at(std::int64_t i) const {
    std::int64_t wraps = i >= 0 ? i / cells : -((-i + cells - 1) / cells);
    const std::int64_t rem = i - wraps * cells;
    return Int(wraps) * total + prefix[static_cast<std::size_t>(rem)];
  }
};

template <class Int>
MassTable<Int> build_table(const TernaryBernoulli& mu, int depth) {
  const BigInt q = denominator(mu.delta());
  const BigInt a = numerator(mu.delta());
  const Int side = Int(a);
  const Int middle = Int(q - 2 * a);
  std::vector<Int> mass{Int(1)};
  for (int level = 0; level < depth; ++level) {
    std::vector<Int> next(mass.size() * 3);
    for (std::size_t i = 0; i < mass.size(); ++i) {
      next[3 * i] = mass[i] * side;
      next[3 * i + 1] = mass[i] * middle;
      next[3 * i + 2] = mass[i] * side;
    }
    mass = std::move(next);
  }
  MassTable<Int> t;
  t.cells = static_cast<std::int64_t>(mass.size());
  t.prefix.resize(mass.size() + 1);
  t.prefix[0] = Int(0);
  for (std::size_t i = 0; i < mass.size(); ++i) t.prefix[i + 1] = t.prefix[i] + mass[i];
  t.total = t.prefix.back();
  return t;
}

template <class Int>
struct Candidate {
  Int outer{};
  Int inner{};
  std::int64_t center = 0;
  int radius_exponent = 0;
  bool set = false;
};

template <class Int>
bool wider(const Int& o1, const Int& i1, const Int& o2, const Int& i2) {
  if constexpr (std::is_same_v<Int, std::int64_t>) {
    return static_cast<__int128>(o1) * i2 > static_cast<__int128>(o2) * i1;
  } else {
    return o1 * i2 > o2 * i1;
  }
}

template <class Int>
Candidate<Int> search(const MassTable<Int>& table, int depth, Exec exec) {
  constexpr std::int64_t kBlock = 4096;
  Candidate<Int> best;
  for (int j = 1; j <= depth; ++j) {
    const std::int64_t s = pow3(depth - j);
    const std::int64_t blocks = (table.cells + kBlock - 1) / kBlock;
    std::vector<Candidate<Int>> local(static_cast<std::size_t>(blocks));
    auto scan = [&](std::int64_t b) {
      auto& c = local[static_cast<std::size_t>(b)];
      const std::int64_t end = std::min(table.cells, (b + 1) * kBlock);
      for (std::int64_t k = b * kBlock; k < end; ++k) {
        const Int inner = table.at(k + s) - table.at(k - s);
        const Int outer = table.at(k + 2 * s) - table.at(k - 2 * s);
        if (!c.set || wider(outer, inner, c.outer, c.inner)) c = {outer, inner, k, j, true};
      }
    };
    if (exec == Exec::serial) {
      for (std::int64_t b = 0; b < blocks; ++b) scan(b);
    } else {
#pragma omp parallel for schedule(static)
      for (std::int64_t b = 0; b < blocks; ++b) scan(b);
    }
    for (const auto& c : local)
      if (c.set && (!best.set || wider(c.outer, c.inner, best.outer, best.inner))) best = c;
  }
  return best;
}

template <class Scalar, class Int>
DoublingEstimate<Scalar> finish(const Candidate<Int>& c, int dim, int depth) {
  DoublingEstimate<Scalar> out;
  out.center_numerator = c.center;
  out.radius_exponent = c.radius_exponent;
  out.depth = depth;
  out.dim = dim;
  if constexpr (std::is_same_v<Scalar, Rational>) {
    const Rational one(BigInt(c.outer), BigInt(c.inner));
    Rational r = 1;
    for (int i = 0; i < dim; ++i) r *= one;
    out.ratio = r;
  } else if constexpr (std::is_same_v<Int, std::int64_t>) {
    out.ratio = std::pow(static_cast<double>(c.outer) / static_cast<double>(c.inner), dim);
  } else {
    out.ratio = std::pow(to_double(Rational(c.outer, c.inner)), dim);
  }
  return out;
}

// Whether 3 * q^depth stays exactly representable in a double.
bool fits_machine_ints(const Rational& delta, int depth) {
  const BigInt bound = 3 * boost::multiprecision::pow(denominator(delta), static_cast<unsigned>(depth));
  return bound < (BigInt(1) << 53);
}

}  // namespace

TernaryBernoulli::TernaryBernoulli(Rational delta) : delta_(std::move(delta)) {
  if (delta_ <= 0 || delta_ > Rational(1, 3)) throw DomainError("delta must lie in (0, 1/3]");
  delta_value_ = to_double(delta_);
}

Rational TernaryBernoulli::weight(int digit) const {
  if (digit == 0 || digit == 2) return delta_;
  if (digit == 1) return 1 - 2 * delta_;
  throw DomainError("invalid ternary digit " + std::to_string(digit));
}

double TernaryBernoulli::weight_value(int digit) const {
  if (digit == 0 || digit == 2) return delta_value_;
  if (digit == 1) return 1.0 - 2.0 * delta_value_;
  throw DomainError("invalid ternary digit " + std::to_string(digit));
}

double interval_measure(const TernaryBernoulli& mu, std::string_view digits) {
  double m = 1.0;
  for (char c : digits) m *= mu.weight_value(digit_of(c));
  return m;
}

Rational interval_measure_exact(const TernaryBernoulli& mu, std::string_view digits) {
  Rational m = 1;
  for (char c : digits) m *= mu.weight(digit_of(c));
  return m;
}

std::vector<int> ternary_digits(const Rational& x, int count) {
  if (x < 0 || x > 1) throw DomainError("x must lie in [0,1]");
  if (count < 0) throw DomainError("negative digit count");
  std::vector<int> out;
  Rational rest = x;
  for (int i = 0; i < count; ++i) {
    // Smallest digit whose tail 3x - digit still lies in [0,1].
    const Rational scaled = 3 * rest;
    int digit = 0;
    while (scaled - digit > 1) ++digit;
    out.push_back(digit);
    rest = scaled - digit;
  }
  return out;
}

template <class Scalar>
DoublingEstimate<Scalar> doubling_constant_estimate(const TernaryBernoulli& mu, int dim, int depth,
                                                    Exec exec) {
  if (dim < 1 || dim > 4) throw DomainError("dimension must be in 1..4");
  if (depth < 1 || depth > 14) throw DomainError("depth must be in 1..14");
  if (fits_machine_ints(mu.delta(), depth)) {
    const auto table = build_table<std::int64_t>(mu, depth);
    return finish<Scalar>(search(table, depth, exec), dim, depth);
  }
  const auto table = build_table<BigInt>(mu, depth);
  return finish<Scalar>(search(table, depth, exec), dim, depth);
}

template DoublingEstimate<double> doubling_constant_estimate<double>(const TernaryBernoulli&, int,
                                                                     int, Exec);
template DoublingEstimate<Rational> doubling_constant_estimate<Rational>(const TernaryBernoulli&,
                                                                         int, int, Exec);

DigitRule::DigitRule(int n1, Rational delta) : n1_(n1), delta_(std::move(delta)) {
  if (n1 < 1) throw DomainError("n1 must be positive");
  if (delta_ <= 0 || delta_ > Rational(1, 3)) throw DomainError("delta must lie in (0, 1/3]");
  const Rational k1 = 3 * delta_ * n1;
  if (denominator(k1) != 1)
    throw DomainError("k1 = 3 delta n1 = " + to_string(k1) + " is not an integer");
  k1_ = numerator(k1).convert_to<std::int64_t>();
}

std::int64_t DigitRule::construction_level(int blocks) const {
  return static_cast<std::int64_t>(n1_) * blocks * (blocks + 1) / 2;
}

bool k_member(std::span<const int> digits, const DigitRule& rule) {
  for (int d : digits)
    if (d < 0 || d > 2) throw DomainError("invalid ternary digit " + std::to_string(d));
  for (int block = 1;; ++block) {
    const auto begin = rule.construction_level(block - 1);
    const auto end = rule.construction_level(block);
    if (end > static_cast<std::int64_t>(digits.size())) return true;
    std::int64_t outer = 0;
    for (auto i = begin; i < end; ++i) outer += digits[static_cast<std::size_t>(i)] != 1;
    if (outer > rule.k(block)) return false;
  }
}

BigInt k_count(const DigitRule& rule, int blocks) {
  if (blocks < 0) throw DomainError("negative block count");
  BigInt product = 1;
  for (int block = 1; block <= blocks; ++block) {
    const std::int64_t len = rule.block_length(block);
    const std::int64_t top = std::min(rule.k(block), len);
    BigInt sum = 0, binom = 1, power = 1;
    for (std::int64_t j = 0; j <= top; ++j) {
      sum += binom * power;
      binom = binom * (len - j) / (j + 1);
      power *= 2;
    }
    product *= sum;
  }
  return product;
}

double analytic_box_bound(const Rational& delta) {
  const double d = to_double(delta);
  return 3.0 / std::log(3.0) * (d + d * std::log(1.0 / d));
}

BoxBound k_boxdim_bound(const DigitRule& rule, int first, int last) {
  if (first < 1 || last < first) throw DomainError("need 1 <= first <= last");
  BoxBound out;
  out.analytic = analytic_box_bound(rule.delta());
  const double ln3 = std::log(3.0);
  std::vector<double> log_counts(static_cast<std::size_t>(last + 1), 0.0);
  for (int block = first; block <= last; ++block) {
    BigInt n = k_count(rule, block);
    const double ln = log_big(n);
    log_counts[static_cast<std::size_t>(block)] = ln;
    out.blocks.push_back(block);
    out.counts.push_back(std::move(n));
    out.exponents.push_back(ln / (static_cast<double>(rule.construction_level(block)) * ln3));
  }
  int block = first;
  for (auto m = rule.construction_level(first) + 1; m <= rule.construction_level(last); ++m) {
    while (rule.construction_level(block + 1) <= m) ++block;
    IntermediateLevel lv;
    lv.level = m;
    lv.blocks = block;
    lv.excess = m - rule.construction_level(block);
    lv.exponent_bound = (log_counts[static_cast<std::size_t>(block)] + static_cast<double>(lv.excess) * ln3) /
                        (static_cast<double>(m) * ln3);
    out.intermediate.push_back(lv);
  }
  return out;
}

double binomial_cdf(std::int64_t k, std::int64_t n, double q) {
  if (n < 0 || !(q >= 0.0 && q <= 1.0)) throw DomainError("need n >= 0 and q in [0,1]");
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (q == 0.0) return 1.0;
  if (q == 1.0) return 0.0;
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-q));
  double sum = pmf;
  const double odds = q / (1.0 - q);
  for (std::int64_t j = 0; j < k; ++j) {
    pmf *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
    sum += pmf;
  }
  return std::min(sum, 1.0);
}

MuKBound mu_k_lower_bound(const DigitRule& rule, int blocks, int dim) {
  if (blocks < 0 || dim < 1) throw DomainError("need blocks >= 0 and dim >= 1");
  MuKBound out;
  out.dim = dim;
  out.product = 1.0;
  const double q = 2.0 * to_double(rule.delta());
  for (int block = 1; block <= blocks; ++block) {
    const double f = binomial_cdf(rule.k(block), rule.block_length(block), std::min(q, 1.0));
    out.factors.push_back(f);
    out.product *= f;
  }
  out.product_power = std::pow(out.product, dim);
  return out;
}

}  // namespace holdercover
