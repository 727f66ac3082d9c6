#include "holdercover/directions.hpp"
#include "holdercover/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace holdercover;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

KPlane line_at(double theta) { return KPlane::line(ProjectivePoint::from_vector(vec2(std::cos(theta), std::sin(theta)))); }

// Largest |eigenvalue| of the symmetric difference of the two projectors.
double metric_oracle(const KPlane& v, const KPlane& w) {
  const Mat diff = v.projector() - w.projector();
  Eigen::SelfAdjointEigenSolver<Mat> solver(diff);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Vec random_in_ball(std::mt19937_64& rng, const Vec& center, double radius) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  Vec g(center.size());
  for (int i = 0; i < g.size(); ++i) g[i] = gauss(rng);
  const double scale = radius * std::pow(unif(rng), 1.0 / static_cast<double>(center.size()));
  return center + scale * g.normalized();
}

}  // namespace

TEST_CASE("direction_of_pair canonicalization") {
  auto a = direction_of_pair(vec2(0, 0), vec2(3, 4));
  CHECK(a.vector()[0] == doctest::Approx(0.6));
  CHECK(a.vector()[1] == doctest::Approx(0.8));
  auto b = direction_of_pair(vec2(1, 1), vec2(0, 0));
  CHECK(b.vector()[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(b.vector()[1] == doctest::Approx(std::sqrt(0.5)));
  auto c = direction_of_pair(vec3(0, 0, 0), vec3(0, 0, 5));
  CHECK(c.vector()[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(direction_of_pair(vec2(1, 2), vec2(1, 2)), DomainError);
}

TEST_CASE("grassmann metric examples") {
  auto v = line_at(0.3);
  CHECK(grassmann_metric(v, v) == doctest::Approx(0.0));
  CHECK(grassmann_metric(line_at(0.0), line_at(std::numbers::pi / 2)) == doctest::Approx(1.0));
  CHECK(grassmann_metric(line_at(0.0), line_at(std::numbers::pi / 6)) == doctest::Approx(0.5));
  CHECK(metric_oracle(line_at(0.0), line_at(std::numbers::pi / 6)) == doctest::Approx(0.5));
}

TEST_CASE("grassmann metric: sin of the angle between lines") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  for (int i = 0; i < 100; ++i) {
    const double a = angle(rng), b = angle(rng);
    CHECK(std::abs(grassmann_metric(line_at(a), line_at(b)) - std::abs(std::sin(a - b))) < 1e-9);
  }
}

TEST_CASE("grassmann metric matches the eigen-solver oracle and is a metric") {
  std::mt19937_64 rng(6);
  for (auto [d, k] : {std::pair{3, 1}, {3, 2}, {4, 1}, {4, 2}, {4, 3}}) {
    for (int i = 0; i < 50; ++i) {
      auto u = random_plane(d, k, rng), v = random_plane(d, k, rng), w = random_plane(d, k, rng);
      const double uv = grassmann_metric(u, v);
      CHECK(std::abs(uv - metric_oracle(u, v)) < 1e-9);
      CHECK(uv == grassmann_metric(v, u));
      CHECK(uv <= grassmann_metric(u, w) + grassmann_metric(w, v) + 1e-9);
      CHECK(grassmann_metric(u, u) < 1e-9);
    }
  }
}

TEST_CASE("line_plane_angle examples") {
  Mat xy(3, 2);
  xy << 1, 0, 0, 1, 0, 0;
  auto plane = KPlane::from_spanning(xy);
  CHECK(line_plane_angle(ProjectivePoint::from_vector(vec3(1, 0, 0)), plane) == doctest::Approx(0.0));
  CHECK(line_plane_angle(ProjectivePoint::from_vector(vec3(0, 0, 1)), plane) ==
        doctest::Approx(std::numbers::pi / 2));
  CHECK(line_plane_angle(ProjectivePoint::from_vector(vec3(1, 0, 1)), plane) ==
        doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("plane construction validation") {
  Mat bad(3, 2);
  bad << 1, 2, 0, 0, 0, 0;
  CHECK_THROWS_AS(KPlane::from_spanning(bad), DomainError);
  Mat skew(2, 1);
  skew << 2, 0;
  CHECK_THROWS_AS(KPlane::from_frame(skew), DomainError);
  CHECK_THROWS_AS(ProjectivePoint::from_vector(Vec::Zero(3)), DomainError);
  std::mt19937_64 rng(1);
  auto p = random_plane(4, 2, rng);
  const Mat c = p.complement_frame();
  CHECK((p.frame().transpose() * c).norm() < 1e-12);
  CHECK((c.transpose() * c - Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("pair angle bound examples against a brute-force boundary oracle") {
  CHECK(pair_angle_bound(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(pair_angle_bound(0.3, 1.0), BoundNotApplicable);

  auto oracle = [](double r, double big_r) {
    // Max angle to the center line over 100 x 100 boundary point pairs.
    double worst = 0.0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double a = 2 * std::numbers::pi * i / n, b = 2 * std::numbers::pi * j / n;
        const Vec x = vec2(r * std::cos(a), r * std::sin(a));
        const Vec y = vec2(big_r + r * std::cos(b), r * std::sin(b));
        const Vec u = (y - x).normalized();
        worst = std::max(worst, std::asin(std::min(1.0, std::abs(u[1]))));
      }
    }
    return worst;
  };
  CHECK(pair_angle_bound(0.1, 1.0) == doctest::Approx(0.4));
  const double o1 = oracle(0.1, 1.0);
  CHECK(o1 == doctest::Approx(std::asin(0.2)).epsilon(0.01));
  CHECK(o1 <= 0.4);
  CHECK(pair_angle_bound(0.05, 1.0) == doctest::Approx(0.2));
  const double o2 = oracle(0.05, 1.0);
  CHECK(o2 == doctest::Approx(0.1002).epsilon(0.01));
  CHECK(o2 <= 0.2);
}

TEST_CASE("property: pair angle bound soundness on 1000 random ball pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const int d = 2 + i % 3;
    Vec c1(d), c2(d);
    for (int a = 0; a < d; ++a) c1[a] = unif(rng), c2[a] = unif(rng);
    const double big_r = (c2 - c1).norm();
    if (big_r < 1e-6) continue;
    const double r = big_r / 4.0 * unif(rng);
    const double bound = pair_angle_bound(Ball{c1, r}, Ball{c2, r});
    const Vec x = random_in_ball(rng, c1, r), y = random_in_ball(rng, c2, r);
    const double angle = line_plane_angle(direction_of_pair(x, y), KPlane::line(direction_of_pair(c1, c2)));
    if (angle > bound + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("net sizes") {
  auto coarse = build_net(2, 1, 0.5, 1);
  CHECK(coarse.size() >= 2);
  CHECK(coarse.size() <= 8);
  CHECK(coarse.audit().passed);
  CHECK(build_net(3, 2, 1.0, 1).size() == 1);
  auto fine = build_net(3, 1, 0.1, 3);
  CHECK(fine.audit().passed);
  CHECK(fine.audit().max_distance <= 0.1);
  CHECK(fine.net_constant() == doctest::Approx(static_cast<double>(fine.size()) * 0.01));
  CHECK(fine.net_constant() < 50.0);
}

TEST_CASE("net of G(2,1) against a dense angular sweep") {
  auto net = build_net(2, 1, 0.05, 9);
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    auto l = line_at(std::numbers::pi * i / 20000.0);
    worst = std::max(worst, net.nearest(l).distance);
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("angle neighborhood") {
  auto net = build_net(2, 1, 0.01, 4);
  auto e1 = ProjectivePoint::from_vector(vec2(1, 0));
  CHECK(angle_neighborhood(net, e1, std::numbers::pi / 2).size() == net.size());

  auto cells = angle_neighborhood(net, e1, 0.1);
  const double limit = 0.1 + mesh_angle(0.01);
  for (auto c : cells) CHECK(line_plane_angle(e1, net.cell(c)) <= limit + 1e-12);
  // Dense sweep: every line within 0.1 of e1 has its nearest cell flagged.
  for (int i = -1000; i <= 1000; ++i) {
    const double theta = 0.1 * i / 1000.0;
    auto near = net.nearest(line_at(theta)).cell;
    CHECK(std::binary_search(cells.begin(), cells.end(), near));
  }
  const double fraction = static_cast<double>(cells.size()) / static_cast<double>(net.size());
  CHECK(fraction == doctest::Approx(0.22 / std::numbers::pi).epsilon(0.25));

  auto center = ProjectivePoint::from_vector(net.cell(7).frame().col(0));
  auto self = angle_neighborhood(net, center, 0.0);
  CHECK(std::binary_search(self.begin(), self.end(), std::size_t{7}));
}

TEST_CASE("property: angle neighborhood outer containment on random planes") {
  std::mt19937_64 rng(77);
  for (auto [d, k] : {std::pair{2, 1}, {3, 1}, {3, 2}}) {
    auto net = build_net(d, k, 0.1, 13);
    for (int trial = 0; trial < 4; ++trial) {
      Vec u(d);
      std::normal_distribution<double> g;
      for (int a = 0; a < d; ++a) u[a] = g(rng);
      auto line = ProjectivePoint::from_vector(u);
      const double delta = 0.3;
      auto cells = angle_neighborhood(net, line, delta);
      for (int s = 0; s < 200; ++s) {
        auto plane = random_plane(d, k, rng);
        if (line_plane_angle(line, plane) > delta) continue;
        CHECK(std::binary_search(cells.begin(), cells.end(), net.nearest(plane).cell));
      }
    }
  }
}

TEST_CASE("content estimate") {
  auto net = build_net(2, 1, 0.05, 2);
  CHECK(content_estimate(net, {}, 1.0) == 0.0);
  std::vector<std::size_t> one{3};
  CHECK(content_estimate(net, one, 1.0) <= 0.1 + 1e-12);
  std::vector<std::size_t> all(net.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const double total = content_estimate(net, all, 1.0);
  CHECK(total >= 1.0);
  CHECK(total <= std::numbers::pi);
}

TEST_CASE("property: content estimate is monotone in the set and in w") {
  std::mt19937_64 rng(8);
  auto net = build_net(3, 1, 0.08, 5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::size_t> small, big;
    std::bernoulli_distribution keep(0.2), extra(0.3);
    for (std::size_t i = 0; i < net.size(); ++i) {
      const bool s = keep(rng);
      if (s) small.push_back(i);
      if (s || extra(rng)) big.push_back(i);
    }
    CHECK(content_estimate(net, small, 1.5) <= content_estimate(net, big, 1.5) + 1e-12);
    double prev = content_estimate(net, big, 0.2);
    for (double w : {0.5, 1.0, 1.5, 2.0}) {
      const double now = content_estimate(net, big, w);
      CHECK(now <= prev + 1e-12);
      prev = now;
    }
  }
}

TEST_CASE("cell flags") {
  CellFlags flags(10);
  flags.set(3);
  flags.set(7);
  flags.set(3);
  CHECK(flags.ids() == std::vector<std::size_t>{3, 7});
  CHECK(flags.test(7));
  CHECK(!flags.test(0));
}
