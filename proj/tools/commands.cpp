#include "commands.hpp"

#include "holdercover/cover.hpp"
#include "holdercover/doubling.hpp"
#include "holdercover/errors.hpp"
#include "holdercover/percolation.hpp"
#include "holdercover/visibility.hpp"

#include <cmath>
#include <random>

namespace holdercover::cli {
namespace {

std::string num(double v) { return Json(v).dump(); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }

int get_int(const Json& c, const char* key) { return static_cast<int>(c.at(key).get<long long>()); }
double get_real(const Json& c, const char* key) { return c.at(key).get<double>(); }
std::string get_text(const Json& c, const char* key) { return c.at(key).get<std::string>(); }

std::pair<int, int> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("window '" + text + "' must be first:last");
  try {
    std::size_t used1 = 0, used2 = 0;
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const int first = std::stoi(a, &used1), last = std::stoi(b, &used2);
    if (used1 != a.size() || used2 != b.size()) throw DomainError("");
    return {first, last};
  } catch (const std::exception&) {
    throw DomainError("window '" + text + "' must be first:last with integers");
  }
}

Json fit_json(const std::optional<LinearFit>& fit) {
  if (!fit) return nullptr;
  return Json{{"slope", fit->slope}, {"intercept", fit->intercept}, {"residual", fit->residual},
              {"points", fit->points}};
}

Json frame_json(const KPlane& plane) {
  Json cols = Json::array();
  for (int c = 0; c < plane.rank(); ++c) {
    Json col = Json::array();
    for (int r = 0; r < plane.dim(); ++r) col.push_back(plane.frame()(r, c));
    cols.push_back(col);
  }
  return cols;
}

Json vec_json(const Vec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const char* kind_name(CertificateViolation::Kind k) {
  switch (k) {
    case CertificateViolation::Kind::collision: return "collision";
    case CertificateViolation::Kind::separation: return "separation";
    case CertificateViolation::Kind::holder: return "holder";
  }
  return "unknown";
}

Outcome run_boxdim(const Json& c) {
  const auto spec = SetSpec::parse(get_text(c, "set"), get_int(c, "depth"));
  const auto sample = generate_standard_set(spec);
  const auto [first, last] = parse_window(get_text(c, "window"));
  const auto cover = build_scale_cover(sample, first, last);
  const auto est = box_dimension_estimate(cover, first, last);
  Outcome out;
  Json counts = Json::array();
  for (const auto& [level, count] : cover.counts()) {
    counts.push_back({{"level", level}, {"count", count}});
    out.rows.push_back({num(std::int64_t{level}), num(count)});
  }
  out.result = {{"points", sample.size()},
                {"base", sample.base()},
                {"counts", counts},
                {"slope", est.slope},
                {"residual", est.residual},
                {"fitted_constant", est.fitted_constant},
                {"degenerate", est.degenerate}};
  return out;
}

Outcome run_cover(const Json& c) {
  const auto spec = SetSpec::parse(get_text(c, "set"), get_int(c, "depth"));
  const auto sample = generate_standard_set(spec);
  CoverParams params{sample.dim(), get_int(c, "k"), get_real(c, "t"), get_real(c, "w"), get_int(c, "n0"),
                     get_int(c, "nmax")};
  params.validate();
  const std::string window_text = get_text(c, "window");
  const auto [first, last] =
      window_text.empty() ? std::pair{params.n0, params.nmax} : parse_window(window_text);
  const auto cover = build_scale_cover(sample, std::min(first, params.n0), std::max(last, params.nmax));
  const auto box = box_dimension_estimate(cover, first, last);
  const auto families = build_pair_families(cover, params);
  const auto seed = static_cast<std::uint64_t>(c.at("seed").get<long long>());
  const auto net = build_net(params.d, params.k, get_real(c, "mesh"), seed);
  const auto report = accumulate_exceptional(families, net, params);

  Outcome out;
  Json levels = Json::array();
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const auto& lv = report.levels[i];
    levels.push_back({{"level", lv.level},
                      {"threshold", families[i].threshold},
                      {"cubes", families[i].cubes.size()},
                      {"pairs", lv.pairs},
                      {"cells", lv.cells.size()},
                      {"content", lv.content},
                      {"tail_content", lv.tail_content},
                      {"min_delta", lv.min_delta},
                      {"max_delta", lv.max_delta}});
    out.rows.push_back({num(std::int64_t{lv.level}), num(lv.pairs), num(lv.cells.size()), num(lv.content),
                        num(lv.tail_content)});
  }

  std::mt19937_64 rng(seed ^ 0x5eedf00dULL);
  const int wanted = get_int(c, "directions");
  Json certs = Json::array();
  std::size_t skipped = 0, failed = 0;
  for (int drawn = 0; static_cast<int>(certs.size()) < wanted; ++drawn) {
    if (drawn > 100 * std::max(wanted, 1)) break;
    auto plane = random_plane(params.d, params.k, rng);
    if (report.flags(net, plane)) {
      ++skipped;
      continue;
    }
    const auto cert = injectivity_certificate(sample, plane, params, &report, &net);
    Json entry{{"frame", frame_json(plane)},
               {"passed", cert.passed},
               {"pairs_checked", cert.pairs_checked},
               {"measured_small_constant", cert.measured_small_constant}};
    if (cert.violation) {
      const auto& v = *cert.violation;
      entry["violation"] = {{"kind", kind_name(v.kind)}, {"first", v.first}, {"second", v.second},
                            {"distance", v.distance}, {"projected", v.projected}, {"level", v.level}};
      ++failed;
    }
    certs.push_back(entry);
  }

  Json warnings = Json::array();
  if (!params.dimension_hypothesis_holds(box.slope))
    warnings.push_back("box-count slope " + num(box.slope) + " is not below t");
  out.result = {{"points", sample.size()},
                {"alpha", params.alpha()},
                {"box_slope", box.slope},
                {"box_window", {first, last}},
                {"net", {{"cells", net.size()}, {"net_constant", net.net_constant()},
                         {"audit_max_distance", net.audit().max_distance}}},
                {"levels", levels},
                {"vacuous", report.vacuous},
                {"decay", fit_json(report.decay)},
                {"decay_bound", 2.0 * (box.slope - params.t) + 0.2},
                {"flagged_draws_skipped", skipped},
                {"certificates", certs},
                {"certificates_failed", failed},
                {"warnings", warnings}};
  if (failed > 0) {
    out.certificate_failed = true;
    out.failure = std::to_string(failed) + " certificate(s) failed";
  }
  return out;
}

Outcome run_percolate(const Json& c) {
  const int d = get_int(c, "d");
  const double t = get_real(c, "t");
  const int depth = get_int(c, "depth");
  const double p = retention_probability(d, t);
  const auto first_seed = static_cast<std::uint64_t>(c.at("seed").get<long long>());
  const auto seeds = static_cast<std::size_t>(std::max(0, get_int(c, "seeds")));
  const auto budget = static_cast<std::size_t>(std::max(0, get_int(c, "max_attempts")));
  const std::string experiment = get_text(c, "experiment");
  Outcome out;
  auto add_rows = [&](std::uint64_t seed, const PercolationTree& tree) {
    for (int n = 0; n <= tree.depth; ++n) out.rows.push_back({std::to_string(seed), num(std::int64_t{n}), num(tree.retained(n))});
  };
  out.result = {{"p", p}, {"experiment", experiment}};

  if (experiment == "calibration") {
    const auto s = survey(d, p, depth, first_seed, seeds);
    Json levels = Json::array();
    for (int n = 0; n <= depth; ++n) {
      const auto count = s.mean_count(n);
      const auto mass = s.mean_mass(n);
      const double expected = std::pow(std::exp2(d) * p, n);
      levels.push_back({{"level", n}, {"mean_count", count.mean}, {"count_std_error", count.std_error},
                        {"expected_count", expected}, {"mean_mass", mass.mean},
                        {"mass_std_error", mass.std_error}});
    }
    Json seed_list = Json::array();
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
      seed_list.push_back(s.seeds[i]);
      for (int n = 0; n <= depth; ++n)
        out.rows.push_back({std::to_string(s.seeds[i]), num(std::int64_t{n}), num(s.counts[i][static_cast<std::size_t>(n)])});
    }
    out.result["seeds"] = seed_list;
    out.result["levels"] = levels;
    return out;
  }

  if (experiment == "slope") {
    const auto cubes = default_transversal_cubes(d);
    const auto [first, last] = parse_window(get_text(c, "window"));
    const auto draw = draw_survivors(d, p, depth, first_seed, seeds, budget, cubes);
    Json runs = Json::array();
    std::vector<double> slopes;
    for (auto seed : draw.seeds) {
      const auto tree = simulate(d, p, depth, seed);
      const auto ds = direction_slope(tree, cubes.first, cubes.second, first, last);
      slopes.push_back(ds.fit.slope);
      Json counts = Json::array();
      for (auto v : ds.counts) counts.push_back(v);
      runs.push_back({{"seed", seed}, {"slope", ds.fit.slope}, {"counts", counts}});
      add_rows(seed, tree);
    }
    const auto mean = mean_with_error(slopes);
    out.result["seeds"] = draw.seeds;
    out.result["rejected"] = draw.rejected;
    out.result["runs"] = runs;
    out.result["mean_slope"] = mean.mean;
    out.result["slope_std_error"] = mean.std_error;
    out.result["target"] = std::min(2.0 * t, static_cast<double>(d - 1));
    return out;
  }

  if (experiment == "coverage") {
    const int m = get_int(c, "resolution");
    const double threshold = get_real(c, "threshold");
    const auto draw = draw_survivors(d, p, depth, first_seed, seeds, budget);
    Json runs = Json::array();
    std::size_t good = 0;
    for (auto seed : draw.seeds) {
      const auto tree = simulate(d, p, depth, seed);
      const double cov = sphere_coverage(tree, m);
      good += cov >= threshold ? 1 : 0;
      runs.push_back({{"seed", seed}, {"coverage", cov}, {"cubes", tree.retained(depth)}});
      add_rows(seed, tree);
    }
    out.result["seeds"] = draw.seeds;
    out.result["rejected"] = draw.rejected;
    out.result["runs"] = runs;
    out.result["fraction_covered"] =
        draw.seeds.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(draw.seeds.size());
    return out;
  }
  throw DomainError("experiment must be slope, coverage or calibration, not '" + experiment + "'");
}

Outcome run_visibility(const Json& c) {
  const auto spec = SetSpec::parse(get_text(c, "set"), get_int(c, "depth"));
  const auto sample = generate_standard_set(spec);
  CoverParams params{sample.dim(), 1, get_real(c, "t"), get_real(c, "w"), get_int(c, "n0"), get_int(c, "nmax")};
  params.validate();
  const double clip = get_real(c, "S");
  const auto cover = build_scale_cover(sample, params.n0, params.nmax);
  const auto families = build_pair_families(cover, params);
  const ViewGrid grid(params.d, clip, get_real(c, "mesh"));
  const auto report = tube_exceptional_points(families, params, grid);

  Outcome out;
  Json levels = Json::array();
  for (const auto& lv : report.levels) {
    levels.push_back({{"level", lv.level}, {"tubes", lv.tubes.size()}, {"cells", lv.flagged.size()},
                      {"content", lv.content}});
    out.rows.push_back({num(std::int64_t{lv.level}), num(lv.tubes.size()), num(lv.flagged.size()), num(lv.content)});
  }

  const auto seed = static_cast<std::uint64_t>(c.at("seed").get<long long>());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-clip, clip);
  Json views = Json::array();
  std::size_t failed = 0;
  const int wanted = get_int(c, "viewpoints");
  for (int i = 0; i < wanted; ++i) {
    Vec h(params.d);
    do {
      for (int a = 0; a < params.d; ++a) h[a] = unif(rng);
    } while (h.norm() > clip);
    const auto cell = grid.cell_of(h);
    bool flagged = false;
    for (const auto& lv : report.levels)
      flagged = flagged || std::binary_search(lv.flagged.begin(), lv.flagged.end(), cell);
    const auto polar = polar_graph_cover(sample, h, params.alpha());
    Json entry{{"viewpoint", vec_json(h)}, {"flagged", flagged}, {"injective", polar.ok()}};
    if (polar.ok()) entry["constant"] = polar.graph->constant;
    if (polar.blocking) entry["blocking"] = {polar.blocking->first, polar.blocking->second};
    if (!polar.ok() && !flagged) ++failed;
    views.push_back(entry);
  }
  out.result = {{"points", sample.size()},
                {"alpha", params.alpha()},
                {"tube_constant", report.tube_constant},
                {"grid", {{"mesh", grid.mesh()}, {"cells", grid.cell_count()}}},
                {"levels", levels},
                {"vacuous", report.vacuous},
                {"decay", fit_json(report.decay)},
                {"viewpoints", views},
                {"unflagged_blocked", failed}};
  if (failed > 0) {
    out.certificate_failed = true;
    out.failure = std::to_string(failed) + " unflagged viewpoint(s) see a blocking pair";
  }
  return out;
}

Outcome run_doubling(const Json& c) {
  const Rational delta = parse_rational(get_text(c, "delta"));
  const DigitRule rule(get_int(c, "n1"), delta);
  const int blocks = get_int(c, "L");
  const int dim = get_int(c, "dim");
  const auto bound = k_boxdim_bound(rule, 1, blocks);
  const auto mu = mu_k_lower_bound(rule, blocks, dim);

  Outcome out;
  Json per_block = Json::array();
  for (std::size_t i = 0; i < bound.blocks.size(); ++i) {
    const auto level = rule.construction_level(bound.blocks[i]);
    per_block.push_back({{"blocks", bound.blocks[i]}, {"level", level}, {"count", bound.counts[i].str()},
                         {"exponent", bound.exponents[i]}, {"mu_factor", mu.factors[i]}});
    out.rows.push_back({num(std::int64_t{bound.blocks[i]}), num(level), bound.counts[i].str(), num(bound.exponents[i])});
  }
  double worst_intermediate = 0.0;
  for (const auto& lv : bound.intermediate) worst_intermediate = std::max(worst_intermediate, lv.exponent_bound);
  out.result = {{"k1", rule.k1()},
                {"analytic_bound", bound.analytic},
                {"blocks", per_block},
                {"intermediate_levels", bound.intermediate.size()},
                {"max_intermediate_exponent", worst_intermediate},
                {"mu_product", mu.product},
                {"mu_product_power", mu.product_power}};
  const int depth = get_int(c, "depth");
  if (depth > 0) {
    const TernaryBernoulli measure(delta);
    const auto est = doubling_constant_estimate<Rational>(measure, dim, depth);
    out.result["doubling"] = {{"depth", depth},
                              {"ratio", to_double(est.ratio)},
                              {"ratio_exact", to_string(est.ratio)},
                              {"center_numerator", est.center_numerator},
                              {"radius_exponent", est.radius_exponent}};
  }
  return out;
}

Outcome run_netaudit(const Json& c) {
  const auto seed = static_cast<std::uint64_t>(c.at("seed").get<long long>());
  const double eps = get_real(c, "epsilon");
  Outcome out;
  try {
    const auto net = build_net(get_int(c, "d"), get_int(c, "k"), eps, seed);
    const auto audit = audit_net(net, static_cast<std::size_t>(get_int(c, "samples")), seed + 1);
    out.result = {{"cells", net.size()},
                  {"net_constant", net.net_constant()},
                  {"build_audit", {{"max_distance", net.audit().max_distance}, {"attempts", net.audit().attempts},
                                   {"pool_size", net.audit().pool_size}}},
                  {"audit", {{"samples", audit.samples}, {"max_distance", audit.max_distance},
                             {"passed", audit.passed}}}};
    out.rows.push_back({num(net.size()), num(net.net_constant()), num(audit.max_distance), audit.passed ? "1" : "0"});
    if (!audit.passed) {
      out.certificate_failed = true;
      out.failure = "audit found a plane farther than epsilon from every cell";
    }
  } catch (const MeshError& e) {
    out.result = {{"error", e.what()}};
    out.certificate_failed = true;
    out.failure = e.what();
  }
  return out;
}

}  // namespace

Outcome run_command(const std::string& name, const Json& config) {
  if (name == "boxdim") return run_boxdim(config);
  if (name == "cover") return run_cover(config);
  if (name == "percolate") return run_percolate(config);
  if (name == "visibility") return run_visibility(config);
  if (name == "doubling") return run_doubling(config);
  if (name == "netaudit") return run_netaudit(config);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace holdercover::cli
