#include "holdercover/errors.hpp"
#include "holdercover/lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace holdercover;

namespace {

// Indices of the level-n intervals of the middle-thirds set, built from digits 0/2.
std::set<std::int64_t> cantor_interval_oracle(int level) {
  std::set<std::int64_t> out{0};
  for (int i = 0; i < level; ++i) {
    std::set<std::int64_t> next;
    for (auto c : out) {
      next.insert(3 * c);
      next.insert(3 * c + 2);
    }
    out = std::move(next);
  }
  return out;
}

PointSample random_sample(std::mt19937_64& rng, int dim, std::size_t count, int precision) {
  std::uniform_int_distribution<std::uint64_t> coord(0, std::uint64_t{1} << precision);
  std::vector<std::uint64_t> nums(count * static_cast<std::size_t>(dim));
  for (auto& v : nums) v = coord(rng);
  return PointSample::from_numerators(2, dim, precision, std::move(nums));
}

}  // namespace

TEST_CASE("single point is covered by one cube") {
  auto s = PointSample::from_numerators(2, 2, 4, {0, 0});
  auto cubes = cover_at_scale(s, 2, 3);
  REQUIRE(cubes.size() == 1);
  CHECK(cubes[0].level == 3);
  CHECK(cubes[0].coords[0] == 0);
  CHECK(cubes[0].coords[1] == 0);
}

TEST_CASE("right edge of the unit interval joins the last cube") {
  auto s = PointSample::from_numerators(2, 1, 3, {8});
  auto cubes = cover_at_scale(s, 2, 3);
  REQUIRE(cubes.size() == 1);
  CHECK(cubes[0].coords[0] == 7);
}

TEST_CASE("middle-thirds cover matches the interval enumeration") {
  auto s = cantor_set(Rational(1, 3), 10);
  CHECK(s.base() == 3);
  for (int n = 0; n <= 10; ++n) {
    auto cubes = cover_at_scale(s, 3, n);
    auto oracle = cantor_interval_oracle(n);
    REQUIRE(cubes.size() == oracle.size());
    CHECK(cubes.size() == (std::size_t{1} << n));
    std::set<std::int64_t> got;
    for (const auto& c : cubes) got.insert(c.coords[0]);
    CHECK(got == oracle);
  }
}

TEST_CASE("full grid at level 2 has 16 cubes") {
  auto s = dyadic_grid(2, 2);
  CHECK(s.size() == 16);
  CHECK(cover_at_scale(s, 2, 2).size() == 16);
}

TEST_CASE("box dimension of the middle-thirds set") {
  auto s = cantor_set(Rational(1, 3), 12);
  auto cover = build_scale_cover(s, 4, 12);
  auto est = box_dimension_estimate(cover, 4, 12);
  CHECK(est.slope == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
  CHECK(est.residual < 1e-9);
  CHECK(est.fitted_constant == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("box dimension of a point and of the full square") {
  auto point = PointSample::from_numerators(2, 2, 10, {123, 456});
  auto c1 = build_scale_cover(point, 0, 8);
  auto e1 = box_dimension_estimate(c1, 2, 8);
  CHECK(e1.slope == doctest::Approx(0.0));
  CHECK(e1.degenerate);

  auto grid = dyadic_grid(2, 6);
  auto c2 = build_scale_cover(grid, 2, 6);
  auto e2 = box_dimension_estimate(c2, 2, 6);
  CHECK(std::abs(e2.slope - 2.0) < 0.01);
}

TEST_CASE("box dimension window validation") {
  auto s = cantor_set(Rational(1, 3), 6);
  auto cover = build_scale_cover(s, 0, 6);
  CHECK_THROWS_AS(box_dimension_estimate(cover, 4, 5), DomainError);
  CHECK_THROWS_AS(box_dimension_estimate(cover, 5, 8), DomainError);
}

TEST_CASE("precision and base errors") {
  auto s = cantor_set(Rational(1, 3), 5);
  CHECK_THROWS_AS(cover_at_scale(s, 3, 6), PrecisionError);
  CHECK_THROWS_AS(cover_at_scale(s, 2, 3), PrecisionError);
  CHECK_THROWS_AS(cantor_set(Rational(1, 3), 41), PrecisionError);
  CHECK_THROWS_AS(cantor_set(Rational(1, 5), 3), DomainError);
  CHECK_THROWS_AS(cantor_set(Rational(2, 3), 3), DomainError);
  CHECK(PointSample::precision_budget(2) == 63);
  CHECK(PointSample::precision_budget(3) == 40);
}

TEST_CASE("standard sets") {
  auto c = cantor_set(Rational(1, 3), 1);
  REQUIRE(c.size() == 2);
  CHECK(c.coord(0, 0) == 0.0);
  CHECK(c.numerator(1, 0) == 2);
  CHECK(c.coord(1, 0) == doctest::Approx(2.0 / 3.0));

  CHECK(corner_dust(2, Rational(1, 32), 2).size() == 16);

  auto dd = dense_direction_countable(2, 3);
  REQUIRE(dd.size() == 4);
  const Vec center = dd.point(0);
  CHECK(center[0] == 0.5);
  CHECK(center[1] == 0.5);
  for (int j = 1; j <= 3; ++j)
    CHECK((dd.point(static_cast<std::size_t>(j)) - center).norm() ==
          doctest::Approx(std::ldexp(1.0, -(j + 1))).epsilon(1e-10));
  CHECK(dense_direction_countable(3, 8).size() == 9);
}

TEST_CASE("corner dust is the product of the one-dimensional set") {
  auto line = cantor_set(Rational(1, 4), 3);
  auto dust = corner_dust(2, Rational(1, 4), 3);
  REQUIRE(dust.size() == line.size() * line.size());
  std::set<std::pair<std::uint64_t, std::uint64_t>> got, want;
  for (std::size_t i = 0; i < dust.size(); ++i) got.insert({dust.numerator(i, 0), dust.numerator(i, 1)});
  for (std::size_t i = 0; i < line.size(); ++i)
    for (std::size_t j = 0; j < line.size(); ++j) want.insert({line.numerator(i, 0), line.numerator(j, 0)});
  CHECK(got == want);
}

TEST_CASE("set spec parsing round trips") {
  for (const char* text : {"cantor1d:1/3", "corner_dust:2:1/32", "dense_direction:2:8", "grid:2:6"}) {
    auto spec = SetSpec::parse(text, 3);
    CHECK(SetSpec::parse(spec.to_string(), 3).to_string() == spec.to_string());
    CHECK(generate_standard_set(spec).size() > 0);
  }
  CHECK_THROWS_AS(SetSpec::parse("cantor1d", 3), DomainError);
  CHECK_THROWS_AS(SetSpec::parse("spiral:1", 3), DomainError);
  CHECK_THROWS_AS(SetSpec::parse("grid:2:x", 3), DomainError);
}

TEST_CASE("property: coarse covers are the ancestors of fine covers") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 3;
    auto s = random_sample(rng, dim, 50 + static_cast<std::size_t>(trial) * 7, 20);
    auto fine = cover_at_scale(s, 2, 12);
    for (int coarse_level : {0, 3, 7, 11}) {
      auto coarse = cover_at_scale(s, 2, coarse_level);
      std::set<LatticeCube> parents;
      for (const auto& c : fine) parents.insert(c.ancestor(coarse_level));
      CHECK(std::vector<LatticeCube>(parents.begin(), parents.end()) == coarse);
      for (const auto& c : fine) CHECK(c.ancestor(coarse_level).contains(c));
    }
    // Every sample point lies in its cube.
    for (std::size_t i = 0; i < s.size(); ++i) {
      bool found = false;
      for (const auto& c : fine) {
        bool inside = true;
        for (int a = 0; a < dim; ++a) {
          const double lo = static_cast<double>(c.coords[static_cast<std::size_t>(a)]) * c.side();
          inside = inside && s.coord(i, a) >= lo && s.coord(i, a) <= lo + c.side();
        }
        found = found || inside;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("cube geometry") {
  LatticeCube c{2, 3, 2, {1, 5, 0, 0}};
  CHECK(c.side() == 0.125);
  CHECK(c.center()[0] == doctest::Approx(0.1875));
  CHECK(c.center()[1] == doctest::Approx(0.6875));
  CHECK(c.circumradius() == doctest::Approx(0.0625 * std::sqrt(2.0)));
  auto p = c.ancestor(1);
  CHECK(p.coords[0] == 0);
  CHECK(p.coords[1] == 1);
  CHECK_THROWS_AS(c.ancestor(4), DomainError);
}
