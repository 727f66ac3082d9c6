#pragma once

#include "holdercover/exec.hpp"
#include "holdercover/rational.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace holdercover {

/// Self-similar measure on [0,1] with ternary digit weights (delta, 1-2delta, delta),
/// extended 1-periodically to the line.
class TernaryBernoulli {
 public:
  /// Requires 0 < delta <= 1/3 (delta = 1/3 is Lebesgue measure).
  explicit TernaryBernoulli(Rational delta);

  const Rational& delta() const { return delta_; }
  double delta_value() const { return delta_value_; }
  Rational weight(int digit) const;
  double weight_value(int digit) const;

 private:
  Rational delta_;
  double delta_value_;
};

/// Mass of the triadic interval with the given digit prefix ("0102"). Throws
/// DomainError on a digit outside 0..2.
double interval_measure(const TernaryBernoulli& mu, std::string_view digits);
Rational interval_measure_exact(const TernaryBernoulli& mu, std::string_view digits);

/// First `count` ternary digits of x in [0,1], taking the lexicographically
/// smallest expansion when x has two.
std::vector<int> ternary_digits(const Rational& x, int count);

template <class Scalar>
struct DoublingEstimate {
  Scalar ratio{};
  std::int64_t center_numerator = 0;  // center = numerator / 3^depth
  int radius_exponent = 0;            // r = 3^-radius_exponent
  int depth = 0;
  int dim = 1;
};

/// max over centers k 3^-depth and radii 3^-j (1 <= j <= depth) of
/// nu(B(x,2r)) / nu(B(x,r)), nu the d-fold product with max-norm balls.
/// Scalar is double or Rational (exact).
template <class Scalar>
DoublingEstimate<Scalar> doubling_constant_estimate(const TernaryBernoulli& mu, int dim, int depth,
                                                    Exec exec = Exec::parallel);

/// Digit rule of the thin set K: block L covers digit positions S_{L-1}+1..S_L,
/// has length n1 L and admits at most k_L = L k1 digits from {0,2}.
class DigitRule {
 public:
  /// Throws DomainError unless k1 = 3 delta n1 is a positive integer.
  DigitRule(int n1, Rational delta);

  int n1() const { return n1_; }
  const Rational& delta() const { return delta_; }
  std::int64_t k1() const { return k1_; }
  std::int64_t k(int block) const { return k1_ * block; }
  std::int64_t block_length(int block) const { return static_cast<std::int64_t>(n1_) * block; }
  std::int64_t construction_level(int blocks) const;  // S_L

 private:
  int n1_;
  Rational delta_;
  std::int64_t k1_;
};

/// True iff every complete block of the digit string respects its bound.
bool k_member(std::span<const int> digits, const DigitRule& rule);

/// Number of level-S_L triadic intervals meeting K:
/// prod_l sum_{j <= k_l} C(n1 l, j) 2^j.
BigInt k_count(const DigitRule& rule, int blocks);

struct IntermediateLevel {
  std::int64_t level = 0;        // m
  int blocks = 0;                // L_m
  std::int64_t excess = 0;       // j_m = m - S_{L_m}
  double exponent_bound = 0.0;   // log(N(S_{L_m}) 3^{j_m}) / (m log 3)
};

struct BoxBound {
  std::vector<int> blocks;
  std::vector<BigInt> counts;
  std::vector<double> exponents;  // log N / (S_L log 3)
  double analytic = 0.0;          // (3 / log 3)(delta + delta log(1/delta))
  std::vector<IntermediateLevel> intermediate;
};

/// Exponents at construction levels for L in [first, last], plus the ceiling bound at
/// every intermediate level m in (S_first, S_last].
BoxBound k_boxdim_bound(const DigitRule& rule, int first, int last);

double analytic_box_bound(const Rational& delta);

/// P(Bin(n, q) <= k) by forward recursion on the pmf.
double binomial_cdf(std::int64_t k, std::int64_t n, double q);

struct MuKBound {
  std::vector<double> factors;  // P(Bin(n1 L, 2 delta) <= k_L)
  double product = 0.0;
  int dim = 1;
  double product_power = 0.0;  // product^dim, the bound for nu(K^d)
};

MuKBound mu_k_lower_bound(const DigitRule& rule, int blocks, int dim = 1);

}  // namespace holdercover
