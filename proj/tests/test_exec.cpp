#include "holdercover/cover.hpp"
#include "holdercover/doubling.hpp"
#include "holdercover/percolation.hpp"
#include "holdercover/visibility.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace holdercover;

namespace {

bool same_planes(const GrassmannNet& a, const GrassmannNet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.cell(i).frame() != b.cell(i).frame()) return false;
  return true;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
  for (int jobs : {1, 2, 4}) {
    set_worker_count(jobs);
    CAPTURE(jobs);

    auto sample = corner_dust(2, Rational(1, 32), 3);
    CHECK(cover_at_scale(sample, 2, 9, Exec::serial) == cover_at_scale(sample, 2, 9, Exec::parallel));

    auto net_s = build_net(3, 1, 0.1, 17, Exec::serial);
    auto net_p = build_net(3, 1, 0.1, 17, Exec::parallel);
    CHECK(same_planes(net_s, net_p));
    CHECK(net_s.audit().max_distance == net_p.audit().max_distance);

    CoverParams params{2, 1, 0.2, 0.6, 5, 8};
    auto cover = build_scale_cover(sample, 0, 8);
    auto fam_s = build_pair_families(cover, params, Exec::serial);
    auto fam_p = build_pair_families(cover, params, Exec::parallel);
    REQUIRE(fam_s.size() == fam_p.size());
    for (std::size_t i = 0; i < fam_s.size(); ++i) {
      REQUIRE(fam_s[i].pairs.size() == fam_p[i].pairs.size());
      for (std::size_t j = 0; j < fam_s[i].pairs.size(); ++j) {
        CHECK(fam_s[i].pairs[j].first == fam_p[i].pairs[j].first);
        CHECK(fam_s[i].pairs[j].second == fam_p[i].pairs[j].second);
      }
    }
    auto net2 = build_net(2, 1, 0.02, 5);
    auto rep_s = accumulate_exceptional(fam_s, net2, params, Exec::serial);
    auto rep_p = accumulate_exceptional(fam_p, net2, params, Exec::parallel);
    for (std::size_t i = 0; i < rep_s.levels.size(); ++i) {
      CHECK(rep_s.levels[i].cells == rep_p.levels[i].cells);
      CHECK(rep_s.levels[i].content == rep_p.levels[i].content);
    }

    auto line = KPlane::line(ProjectivePoint::from_vector((Vec(2) << std::cos(0.3), std::sin(0.3)).finished()));
    auto cs = injectivity_certificate(sample, line, params, nullptr, nullptr, Exec::serial);
    auto cp = injectivity_certificate(sample, line, params, nullptr, nullptr, Exec::parallel);
    CHECK(cs.passed == cp.passed);
    CHECK(cs.measured_small_constant == cp.measured_small_constant);
    CHECK(cs.violation.has_value() == cp.violation.has_value());
    if (cs.violation && cp.violation) {
      CHECK(cs.violation->first == cp.violation->first);
      CHECK(cs.violation->second == cp.violation->second);
    }

    const double p = retention_probability(2, 1.2);
    CHECK(simulate(2, p, 9, 4, Exec::serial).levels == simulate(2, p, 9, 4, Exec::parallel).levels);
    auto [q1, q2] = default_transversal_cubes(2);
    const auto alive = draw_survivors(2, p, 9, 1, 1, 1000, std::pair{q1, q2});
    auto tree = simulate(2, p, 9, alive.seeds.at(0));
    auto ds = direction_slope(tree, q1, q2, 3, 9, Exec::serial);
    auto dp = direction_slope(tree, q1, q2, 3, 9, Exec::parallel);
    CHECK(ds.counts == dp.counts);
    CHECK(sphere_coverage(tree, 7, Exec::serial) == sphere_coverage(tree, 7, Exec::parallel));
    CHECK(survey(2, 0.5, 6, 1, 50, Exec::serial).counts == survey(2, 0.5, 6, 1, 50, Exec::parallel).counts);
    CHECK(draw_survivors(2, 0.4, 6, 1, 10, 1000, std::nullopt, Exec::serial).seeds ==
          draw_survivors(2, 0.4, 6, 1, 10, 1000, std::nullopt, Exec::parallel).seeds);

    TernaryBernoulli mu(Rational(1, 10));
    auto es = doubling_constant_estimate<Rational>(mu, 1, 8, Exec::serial);
    auto ep = doubling_constant_estimate<Rational>(mu, 1, 8, Exec::parallel);
    CHECK(es.ratio == ep.ratio);
    CHECK(es.center_numerator == ep.center_numerator);
    CHECK(es.radius_exponent == ep.radius_exponent);

    ViewGrid grid(2, 2.0, 0.03);
    CoverParams vis{2, 1, 0.2, 0.6, 6, 7};
    auto vfam = build_pair_families(cover, vis);
    auto ts = tube_exceptional_points(vfam, vis, grid, Exec::serial);
    auto tp = tube_exceptional_points(vfam, vis, grid, Exec::parallel);
    for (std::size_t i = 0; i < ts.levels.size(); ++i) CHECK(ts.levels[i].flagged == tp.levels[i].flagged);

    Vec h(2);
    h << -1.0, -1.0;
    auto ps = polar_graph_cover(sample, h, 0.5, Exec::serial);
    auto pp = polar_graph_cover(sample, h, 0.5, Exec::parallel);
    CHECK(ps.ok() == pp.ok());
    if (ps.ok() && pp.ok()) CHECK(ps.graph->constant == pp.graph->constant);
  }
  set_worker_count(0);
}
