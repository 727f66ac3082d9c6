#pragma once

#include "holdercover/exec.hpp"
#include "holdercover/linalg.hpp"
#include "holdercover/rational.hpp"
#include "holdercover/stats.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace holdercover {

inline constexpr int kMaxDim = 4;

/// Closed base-b cube of side b^-level. Only the first `dim` coords are used.
struct LatticeCube {
  int base = 2;
  int level = 0;
  int dim = 1;
  std::array<std::int64_t, kMaxDim> coords{};

  double side() const;
  Vec center() const;
  /// Half-diagonal: the radius of the circumscribed ball.
  double circumradius() const;
  /// The level-`coarser` ancestor. coarser <= level.
  LatticeCube ancestor(int coarser) const;
  bool contains(const LatticeCube& finer) const;

  auto operator<=>(const LatticeCube&) const = default;
};

/// Finite point set in [0,1]^d with exact coordinates numerator / base^precision.
class PointSample {
 public:
  /// Validates every numerator is <= base^precision and the sample is nonempty.
  static PointSample from_numerators(int base, int dim, int precision,
                                     std::vector<std::uint64_t> numerators);

  int base() const { return base_; }
  int dim() const { return dim_; }
  int precision() const { return precision_; }
  std::size_t size() const { return numerators_.size() / static_cast<std::size_t>(dim_); }

  std::uint64_t numerator(std::size_t i, int axis) const {
    return numerators_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)];
  }
  double coord(std::size_t i, int axis) const;
  Vec point(std::size_t i) const;
  std::vector<Vec> points() const;

  /// Largest precision with base^precision representable in 64 bits.
  static int precision_budget(int base);

 private:
  PointSample(int base, int dim, int precision, std::vector<std::uint64_t> numerators);

  int base_;
  int dim_;
  int precision_;
  std::uint64_t denominator_;
  std::vector<std::uint64_t> numerators_;
};

/// Level-n cubes containing at least one sample point, sorted and unique.
/// Cubes are half-open except at the right edge of [0,1], which joins the last cube.
std::vector<LatticeCube> cover_at_scale(const PointSample& sample, int base, int level,
                                        Exec exec = Exec::parallel);

struct ScaleCover {
  int base = 2;
  int dim = 1;
  std::map<int, std::vector<LatticeCube>> families;

  std::size_t count(int level) const;
  std::vector<std::pair<int, std::size_t>> counts() const;
};

ScaleCover build_scale_cover(const PointSample& sample, int min_level, int max_level,
                             Exec exec = Exec::parallel);

struct BoxDimensionEstimate {
  double slope = 0.0;
  double residual = 0.0;
  /// exp(intercept): the fitted C in N_n ~ C * b^(s n).
  double fitted_constant = 0.0;
  bool degenerate = false;
  int first_level = 0;
  int last_level = 0;
};

/// OLS slope of log N_n against n log b over [first_level, last_level].
BoxDimensionEstimate box_dimension_estimate(const ScaleCover& cover, int first_level,
                                            int last_level);

enum class SetKind { cantor1d, corner_dust, dense_direction_countable, grid };

struct SetSpec {
  SetKind kind = SetKind::cantor1d;
  int dim = 1;
  Rational ratio{1, 3};  // cantor1d, corner_dust
  int count = 0;         // J for dense_direction_countable, n for grid
  int depth = 1;         // IFS depth for the self-similar kinds

  /// "cantor1d:1/3", "corner_dust:2:1/32", "dense_direction:2:8", "grid:2:6".
  static SetSpec parse(const std::string& text, int depth);
  std::string to_string() const;
};

PointSample generate_standard_set(const SetSpec& spec);

// Direct factories, also used by tests.
PointSample cantor_set(const Rational& ratio, int depth);
PointSample corner_dust(int dim, const Rational& ratio, int depth);
/// {c} together with c + 2^-(j+1) e_j, j = 1..J, where c is the center of the unit
/// cube and e_j runs through a dense sequence of unit vectors. d in {2, 3}.
PointSample dense_direction_countable(int dim, int count);
/// Lower-left corners of all level-n dyadic cubes of [0,1]^d.
PointSample dyadic_grid(int dim, int level);

}  // namespace holdercover
