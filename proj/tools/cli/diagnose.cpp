#include "cli/diagnose.hpp"

#include <cmath>

#include "causalcal/calibrators.hpp"
#include "causalcal/metrics.hpp"
#include "causalcal/pipelines.hpp"
#include "causalcal/synth.hpp"

namespace causalcal::cli {

using ojson = nlohmann::ordered_json;

ojson diagnose_orthogonality(std::uint64_t seed) {
  const DiscreteCateDgp dgp = DiscreteCateDgp::standard();
  const DiscreteOracle oracle = dgp.to_oracle();
  const NuisanceSet g0 = dgp.true_nuisances(oracle);
  Rng rng = derive_stream(seed, 0).generator();
  std::vector<double> theta = dgp.theta0(), d0(theta.size()), d1(theta.size()), dpi(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    theta[j] += rng.uniform(-0.5, 0.5);
    d0[j] = rng.uniform(-1.0, 1.0);
    d1[j] = rng.uniform(-1.0, 1.0);
    dpi[j] = rng.uniform(-0.05, 0.05);
  }
  const std::map<std::string, Predictor> delta{{"mu0", oracle.table_predictor(d0)},
                                               {"mu1", oracle.table_predictor(d1)},
                                               {"pi", oracle.table_predictor(dpi)}};
  const std::vector<double> ts{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  auto path = [&](double t) { return perturb(g0, delta, t); };

  const double dr = orthogonality_slope(oracle, default_loss_spec(Effect::cate), theta, g0, path, ts);
  LossSpec plugin;
  plugin.kind = LossKind::cate_plugin;
  const double pl = orthogonality_slope(oracle, plugin, theta, g0, path, ts);

  ojson j;
  j["check"] = "orthogonality";
  j["t_grid"] = ts;
  ojson a;
  a["loss"] = "cate";
  a["slope"] = dr;
  a["orthogonal"] = dr >= 1.9 && dr <= 2.1;
  ojson b;
  b["loss"] = "cate-plugin";
  b["slope"] = pl;
  b["orthogonal"] = false;
  b["expected"] = "fail-by-design";
  b["as_expected"] = pl >= 0.9 && pl <= 1.1;
  j["results"] = ojson::array({a, b});
  j["pass"] = a["orthogonal"].get<bool>() && b["as_expected"].get<bool>();
  return j;
}

ojson diagnose_theorem1(std::uint64_t seed, std::size_t draws) {
  std::size_t holds = 0;
  double worst = -INFINITY;
  ojson rows = ojson::array();
  for (std::size_t k = 0; k < draws; ++k) {
    const SeedStream s = derive_stream(seed, 100 + k);
    const DiscreteCateDgp dgp = DiscreteCateDgp::random(s.child(0));
    const DiscreteOracle oracle = dgp.to_oracle();
    const NuisanceSet g0 = dgp.true_nuisances(oracle);
    Rng rng = s.child(1).generator();
    std::vector<double> theta(dgp.atoms.size()), m0 = dgp.mu(0), m1 = dgp.mu(1), pi = dgp.pi;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      theta[j] = rng.normal();
      m0[j] += 0.5 * rng.normal();
      m1[j] += 0.5 * rng.normal();
      pi[j] = std::clamp(pi[j] + rng.uniform(-0.1, 0.1), 0.05, 0.95);
    }
    const NuisanceSet g(Effect::cate, {{"mu0", oracle.table_predictor(m0)},
                                       {"mu1", oracle.table_predictor(m1)},
                                       {"pi", oracle.table_predictor(pi)}});
    const BoundCheck c = theorem_bound_check(oracle, theta, g, g0, default_loss_spec(Effect::cate));
    holds += c.holds;
    worst = std::max(worst, c.lhs - c.rhs);
    ojson r;
    r["lhs"] = c.lhs;
    r["cross"] = c.cross;
    r["cal_under_g"] = c.cal_under_g;
    r["holds"] = c.holds;
    rows.push_back(r);
  }
  ojson j;
  j["check"] = "theorem1";
  j["draws"] = draws;
  j["holds"] = holds;
  j["max_lhs_minus_rhs"] = worst;
  j["results"] = rows;
  j["pass"] = holds == draws;
  return j;
}

ojson diagnose_convexity(std::uint64_t seed) {
  (void)seed;
  std::vector<double> grid;
  for (int k = 0; k <= 400; ++k) grid.push_back(-4.0 + 0.02 * k);

  const DiscreteCateDgp dgp = DiscreteCateDgp::standard();
  const DiscreteOracle oracle = dgp.to_oracle();
  const DiscreteLossOracle cate(oracle, default_loss_spec(Effect::cate), dgp.true_nuisances(oracle));
  const LossProperties pc = measure_convexity(cate, grid);

  const std::vector<double> means{-0.5, 0.0, 0.5}, pi0{0.3, 0.5, 0.7};
  std::vector<double> p, f{0.2, 0.5, 0.8};
  for (double v : pi0) p.push_back(1.0 / v);
  const GaussianQutOracle qut(means, pi0, p, f, 0.75);
  std::vector<double> qgrid;
  for (int k = 0; k <= 200; ++k) qgrid.push_back(-2.0 + 0.02 * k);
  const LossProperties pq = measure_convexity(qut, qgrid);

  auto entry = [](const char* loss, const LossProperties& p) {
    ojson e;
    e["loss"] = loss;
    e["alpha"] = p.alpha;
    e["beta"] = p.beta;
    e["strongly_convex"] = p.strongly_convex();
    return e;
  };
  ojson j;
  j["check"] = "convexity";
  j["results"] = ojson::array({entry("cate", pc), entry("qut-corrected", pq)});
  j["pass"] = pc.strongly_convex() && pq.strongly_convex();
  return j;
}

UmbMassStudy umb_mass_study(std::uint64_t seed, std::size_t runs, std::size_t per_third, std::size_t bins) {
  const SyntheticCateDgp dgp;
  const Predictor mu0("true mu0", [dgp](std::span<const double> x) { return dgp.mu0(x); });
  const Predictor mu1("true mu1", [dgp](std::span<const double> x) { return dgp.mu0(x) + dgp.tau(x); });
  const Predictor pi("true pi", [dgp](std::span<const double> x) { return dgp.propensity(x); });
  const Predictor base("base", [dgp](std::span<const double> x) { return 1.3 * dgp.tau(x) + 0.2; });

  UmbMassStudy study;
  study.runs = runs;
  study.bins = bins;
  const double lo = 1.0 / (2.0 * static_cast<double>(bins)), hi = 2.0 / static_cast<double>(bins);
  for (std::size_t r = 0; r < runs; ++r) {
    const SeedStream s = derive_stream(seed, 200 + r);
    const Dataset data = dgp.sample(3 * per_third, s.child(0));
    PipelineConfig cfg;
    cfg.effect = Effect::cate;
    cfg.bins = bins;
    cfg.seed = s.child(1).generator().next();
    cfg.learners.outcome.kind = LearnerKind::oracle;
    cfg.learners.oracle = {{"mu0", mu0}, {"mu1", mu1}, {"pi", pi}};
    const CalibrationResult res = three_way_umb(data, base, cfg);
    const auto& edges = res.model.as<BinningParams>().edges;

    const Dataset held = dgp.sample(per_third, s.child(2));
    std::vector<double> mass(edges.size() + 1, 0.0);
    for (const auto& z : held.rows()) mass[bucket_of(edges, base(z.x))] += 1.0;
    bool ok = true;
    for (auto& m : mass) {
      m /= static_cast<double>(held.size());
      study.min_mass = std::min(study.min_mass, m);
      study.max_mass = std::max(study.max_mass, m);
      ok = ok && m >= lo && m <= hi;
    }
    study.runs_in_range += ok;
    study.masses.push_back(std::move(mass));
  }
  return study;
}

ojson diagnose_umb_mass(std::uint64_t seed, std::size_t runs, std::size_t per_third, std::size_t bins) {
  const UmbMassStudy s = umb_mass_study(seed, runs, per_third, bins);
  ojson j;
  j["check"] = "umb-mass";
  j["runs"] = s.runs;
  j["bins"] = s.bins;
  j["rows_per_third"] = per_third;
  j["bounds"] = {1.0 / (2.0 * static_cast<double>(bins)), 2.0 / static_cast<double>(bins)};
  j["runs_in_range"] = s.runs_in_range;
  j["min_mass"] = s.min_mass;
  j["max_mass"] = s.max_mass;
  j["pass"] = static_cast<double>(s.runs_in_range) >= 0.95 * static_cast<double>(s.runs);
  return j;
}

}  // namespace causalcal::cli
