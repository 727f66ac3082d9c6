#include "holdercover/errors.hpp"
#include "holdercover/visibility.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace holdercover;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Both points on the same ray from h, by exact cross and dot products.
bool same_ray_oracle(const Vec& h, const Vec& x, const Vec& y) {
  const Vec u = x - h, v = y - h;
  const double cross = u[0] * v[1] - u[1] * v[0];
  return std::abs(cross) <= 1e-12 * u.norm() * v.norm() && u.dot(v) > 0;
}

}  // namespace

TEST_CASE("spherical projection") {
  auto a = spherical_project(vec2(0, 0), vec2(0, 2));
  CHECK(a[0] == doctest::Approx(0.0));
  CHECK(a[1] == doctest::Approx(-1.0));
  auto b = spherical_project(vec2(1, 0), vec2(0, 0));
  CHECK(b[0] == doctest::Approx(1.0));
  auto c = spherical_project(vec2(1, 0), vec2(0, 0), ViewSign::away_from_viewpoint);
  CHECK(c[0] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(spherical_project(vec2(1, 1), vec2(1, 1)), DomainError);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    Vec h(3), x(3);
    for (int a2 = 0; a2 < 3; ++a2) h[a2] = g(rng), x[a2] = g(rng);
    CHECK(spherical_project(h, x).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("tube membership matches the distance-to-line oracle") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const Vec p = vec2(unif(rng), unif(rng));
    const Vec v = vec2(unif(rng), unif(rng)).normalized();
    TubeSet tube{Line{p, v}, 0.3, 3.0};
    for (int j = 0; j < 50; ++j) {
      const Vec x = vec2(unif(rng), unif(rng));
      const Vec rel = x - p;
      const double dist = (rel - rel.dot(v) * v).norm();
      CHECK(tube.line.distance_to(x) == doctest::Approx(dist).epsilon(1e-12));
      if (std::abs(dist - 0.3) > 1e-9 && x.norm() <= 3.0) CHECK(tube.contains(x) == (dist <= 0.3));
    }
  }
}

TEST_CASE("tube constant and grid geometry") {
  CHECK(tube_constant(2.0, 2) == doctest::Approx(8.0 + 5.0 * std::sqrt(2.0)));
  ViewGrid grid(2, 2.0, 0.07);
  CHECK(grid.mesh() <= 0.07);
  CHECK(grid.mesh() * static_cast<double>(grid.cells_per_axis()) == doctest::Approx(4.0));
  for (std::uint64_t cell = 0; cell < grid.cell_count(); cell += 97) CHECK(grid.cell_of(grid.center(cell)) == cell);
  CHECK_THROWS_AS(ViewGrid(4, 2.0, 0.1), DomainError);
}

TEST_CASE("flagged tube cells cover every tube point in the clip ball") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  ViewGrid grid(2, 2.0, 0.02);
  for (int i = 0; i < 20; ++i) {
    TubeSet tube{Line{vec2(unif(rng), unif(rng)), vec2(unif(rng), unif(rng)).normalized()}, 0.05, 2.0};
    auto cells = grid.flag_tube(tube);
    CHECK(std::is_sorted(cells.begin(), cells.end()));
    for (int j = 0; j < 500; ++j) {
      const Vec x = tube.line.point + 2.5 * unif(rng) * tube.line.direction +
                    0.05 * unif(rng) * vec2(-tube.line.direction[1], tube.line.direction[0]);
      if (x.norm() > 2.0) continue;
      CHECK(std::binary_search(cells.begin(), cells.end(), grid.cell_of(x)));
    }
    // No flagged cell is farther than a half-diagonal from the tube.
    for (auto c : cells) CHECK(tube.line.distance_to(grid.center(c)) <= 0.05 + grid.half_diagonal() + 1e-12);
  }
}

TEST_CASE("tube content scales as radius^w") {
  const double w = 0.95;
  ViewGrid grid(2, 2.0, std::ldexp(1.0, -10));
  double prev = 0.0;
  for (int j = 4; j <= 8; ++j) {
    TubeSet tube{Line{vec2(0.25, 0.5), unit_direction(vec2(0.75, 0.6), vec2(0.25, 0.5))}, std::ldexp(1.0, -j), 2.0};
    const double content = grid_content(grid, grid.flag_tube(tube), w + 1.0);
    if (prev > 0.0) CHECK(std::abs(prev / content / std::pow(2.0, w) - 1.0) <= 0.2);
    prev = content;
  }
  CHECK(grid_content(grid, {}, 1.5) == 0.0);
}

TEST_CASE("two-point set flags one tube") {
  auto s = PointSample::from_numerators(2, 2, 10, {102, 102, 922, 614});
  CoverParams p{2, 1, 0.2, 0.6, 8, 10};
  auto fams = build_pair_families(build_scale_cover(s, 0, 10), p);
  ViewGrid grid(2, 2.0, 0.03);
  auto rep = tube_exceptional_points(fams, p, grid);
  CHECK(!rep.vacuous);
  for (const auto& lv : rep.levels) {
    CHECK(lv.tubes.size() == 1);
    CHECK(!lv.flagged.empty());
    CHECK(lv.flagged == grid.flag_tube(lv.tubes[0]));
  }
  // Viewpoints on the line through the pair are blocked and flagged.
  const Vec a = s.point(0), b = s.point(1);
  for (double t : {-1.0, -0.5, 1.5, 2.0}) {
    const Vec h = a + t * (b - a);
    if (h.norm() > 2.0) continue;
    CHECK(!polar_graph_cover(s, h, 0.5).ok());
    for (const auto& lv : rep.levels) CHECK(std::binary_search(lv.flagged.begin(), lv.flagged.end(), grid.cell_of(h)));
  }
}

TEST_CASE("empty families and coarse grids") {
  CoverParams p{2, 1, 0.2, 0.6, 1, 2};
  std::vector<PairFamily> fams(2);
  auto rep = tube_exceptional_points(fams, p, ViewGrid(2, 2.0, 0.1));
  CHECK(rep.vacuous);
  for (const auto& lv : rep.levels) CHECK(lv.content == 0.0);

  auto s = PointSample::from_numerators(2, 2, 10, {102, 102, 922, 614});
  CoverParams deep{2, 1, 0.2, 0.6, 10, 10};
  auto f2 = build_pair_families(build_scale_cover(s, 0, 10), deep);
  CHECK_THROWS_AS(tube_exceptional_points(f2, deep, ViewGrid(2, 2.0, 0.2)), MeshError);
  CoverParams k2{3, 2, 0.2, 1.6, 1, 2};
  CHECK_THROWS_AS(tube_exceptional_points(fams, k2, ViewGrid(3, 2.0, 0.5)), DomainError);
}

TEST_CASE("polar graph examples") {
  auto two = PointSample::from_numerators(2, 2, 0, {1, 0, 0, 1});
  auto ok = polar_graph_cover(two, vec2(0, 0), 0.5);
  REQUIRE(ok.ok());
  CHECK(ok.graph->directions[0][0] == doctest::Approx(-1.0));
  CHECK(ok.graph->directions[1][1] == doctest::Approx(-1.0));
  CHECK(ok.graph->radii[0] == 1.0);
  CHECK(ok.graph->radii[1] == 1.0);
  CHECK(ok.graph->constant == 0.0);

  auto collinear = PointSample::from_numerators(2, 2, 2, {1, 0, 2, 0});
  auto bad = polar_graph_cover(collinear, vec2(0, 0), 0.5);
  CHECK(!bad.ok());
  CHECK(bad.blocking == std::pair<std::size_t, std::size_t>{0, 1});
  // Opposite sides of the viewpoint do not block.
  CHECK(polar_graph_cover(collinear, vec2(0.4, 0), 0.5).ok());
  CHECK_THROWS_AS(polar_graph_cover(collinear, vec2(0.25, 0), 0.5), DomainError);
}

TEST_CASE("polar verdicts equal the exhaustive collinearity oracle") {
  auto s = corner_dust(2, Rational(1, 32), 3);
  const auto pts = s.points();
  const double alpha = 1.0 - 2.0 * 0.45 / 0.95;
  auto oracle = [&](const Vec& h) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (same_ray_oracle(h, pts[i], pts[j])) return false;
    return true;
  };
  auto fixed = polar_graph_cover(s, vec2(-1, -1), alpha);
  CHECK(fixed.ok() == oracle(vec2(-1, -1)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  int blocked = 0;
  for (int i = 0; i < 40; ++i) {
    Vec h = vec2(unif(rng), unif(rng));
    if (i % 2 == 1) {
      // Put h on the line through two sample points, beyond the second one.
      const std::size_t a = pick(rng), b = (a + 1 + pick(rng) % (pts.size() - 1)) % pts.size();
      h = pts[b] + (0.5 + std::abs(unif(rng))) * (pts[b] - pts[a]);
    }
    const auto r = polar_graph_cover(s, h, alpha);
    CHECK(r.ok() == oracle(h));
    blocked += r.ok() ? 0 : 1;
  }
  CHECK(blocked > 0);
}
