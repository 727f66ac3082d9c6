// Serial reference vs OpenMP kernels: wall time per kernel, plus an equality check.

#include "holdercover/cover.hpp"
#include "holdercover/doubling.hpp"
#include "holdercover/exec.hpp"
#include "holdercover/percolation.hpp"
#include "holdercover/visibility.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace holdercover;

namespace {

struct Kernel {
  std::string name;
  // Runs the kernel once with the given mode and returns a fingerprint of the result.
  std::function<std::string(Exec)> run;
};

template <class T>
std::string bytes_of(const T& value) {
  return std::string(reinterpret_cast<const char*>(&value), sizeof value);
}

double best_of(int repeats, const std::function<void()>& body) {
  double best = INFINITY;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  int jobs = 0, repeats = 3;
  app.add_option("--jobs", jobs, "OpenMP workers (0: runtime default)");
  app.add_option("--repeat", repeats, "timed runs per kernel, best kept")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  set_worker_count(jobs);

  const auto dust = corner_dust(2, Rational(1, 32), 4);
  const CoverParams params{2, 1, 0.45, 0.95, 10, 13};
  const auto cover = build_scale_cover(dust, 10, 13);
  const auto families = build_pair_families(cover, params);
  const auto net = build_net(2, 1, 6e-4, 7);
  const auto line = KPlane::line(ProjectivePoint::from_vector((Vec(2) << std::cos(0.3), std::sin(0.3)).finished()));
  const double p_sharp = retention_probability(2, 0.8);
  const auto tree = simulate(2, p_sharp, 11, 1003);
  const CoverParams view{2, 1, 0.2, 0.6, 6, 9};
  const auto view_families = build_pair_families(build_scale_cover(corner_dust(2, Rational(1, 32), 3), 6, 9), view);
  const ViewGrid grid(2, 2.0, 0.005);

  const std::vector<Kernel> kernels{
      {"cover_at_scale (1024 pts, level 20)",
       [&](Exec e) {
         std::string s;
         for (const auto& c : cover_at_scale(dust, 2, 20, e)) s += bytes_of(c.coords);
         return s;
       }},
      {"build_pair_families (levels 10..13)",
       [&](Exec e) {
         std::string s;
         for (const auto& f : build_pair_families(cover, params, e))
           for (const auto& pr : f.pairs) s += bytes_of(pr.first) + bytes_of(pr.second);
         return s;
       }},
      {"build_net G(2,1) eps 6e-4",
       [&](Exec e) {
         const auto n = build_net(2, 1, 6e-4, 7, e);
         return bytes_of(n.size()) + bytes_of(n.audit().max_distance);
       }},
      {"accumulate_exceptional",
       [&](Exec e) {
         std::string s;
         for (const auto& lv : accumulate_exceptional(families, net, params, e).levels)
           s += bytes_of(lv.content) + bytes_of(lv.cells.size());
         return s;
       }},
      {"injectivity_certificate (1024 pts)",
       [&](Exec e) {
         const auto c = injectivity_certificate(dust, line, params, nullptr, nullptr, e);
         return bytes_of(c.passed) + bytes_of(c.measured_small_constant);
       }},
      {"simulate percolation d=2 depth 13",
       [&](Exec e) { return bytes_of(simulate(2, p_sharp, 13, 1003, e).retained(13)); }},
      {"sphere_coverage m=8 (depth 11)", [&](Exec e) { return bytes_of(sphere_coverage(tree, 8, e)); }},
      {"doubling estimate delta=1/10 depth 9",
       [&](Exec e) {
         return bytes_of(doubling_constant_estimate<double>(TernaryBernoulli(Rational(1, 10)), 1, 9, e).ratio);
       }},
      {"tube_exceptional_points mesh 0.005",
       [&](Exec e) {
         std::string s;
         for (const auto& lv : tube_exceptional_points(view_families, view, grid, e).levels)
           s += bytes_of(lv.content) + bytes_of(lv.flagged.size());
         return s;
       }},
  };

  std::printf("OpenMP workers: %d, best of %d\n", worker_count(), repeats);
  std::printf("%-40s %12s %12s %8s %s\n", "kernel", "serial ms", "parallel ms", "speedup", "equal");
  bool all_equal = true;
  for (const auto& k : kernels) {
    std::string serial, parallel;
    const double ts = best_of(repeats, [&] { serial = k.run(Exec::serial); });
    const double tp = best_of(repeats, [&] { parallel = k.run(Exec::parallel); });
    all_equal = all_equal && serial == parallel;
    std::printf("%-40s %12.2f %12.2f %8.2f %s\n", k.name.c_str(), 1e3 * ts, 1e3 * tp, ts / tp,
                serial == parallel ? "yes" : "NO");
  }
  return all_equal ? 0 : 1;
}
