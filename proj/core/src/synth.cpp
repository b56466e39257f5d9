#include "causalcal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "causalcal/error.hpp"

namespace causalcal {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCategory::invalid_argument, "normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

QutDgp QutDgp::draw(const SeedStream& seed, std::size_t dim, std::size_t nonzero, double clip) {
  if (nonzero > dim) throw Error(ErrorCategory::invalid_argument, "more nonzero slopes than dimensions");
  if (!(clip >= 0.0 && clip < 0.5)) throw Error(ErrorCategory::invalid_argument, "clip must lie in [0, 1/2)");
  QutDgp d;
  d.dim = dim;
  d.nonzero = nonzero;
  d.clip = clip;
  d.beta_y.assign(dim, 0.0);
  d.beta_pi.assign(dim, 0.0);
  Rng rng = seed.generator();
  for (std::size_t j = 0; j < nonzero; ++j) d.beta_y[j] = rng.normal();
  for (std::size_t j = 0; j < nonzero; ++j) d.beta_pi[j] = rng.normal();
  return d;
}

double QutDgp::propensity(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) s += beta_pi[j] * x[j];
  return std::clamp(1.0 / (1.0 + std::exp(s)), clip, 1.0 - clip);
}

double QutDgp::mean(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) s += beta_y[j] * x[j];
  return s;
}

Dataset sample_qut(std::size_t n, const QutDgp& dgp, const SeedStream& seed) {
  if (n == 0) throw Error(ErrorCategory::invalid_argument, "sample size must be positive");
  if (dgp.beta_y.size() != dgp.dim || dgp.beta_pi.size() != dgp.dim) {
    throw Error(ErrorCategory::invalid_argument, "slope vectors do not match the dimension");
  }
  Rng rng = seed.generator();
  std::vector<Observation> rows(n);
  for (auto& r : rows) {
    r.x.resize(dgp.dim);
    for (auto& v : r.x) v = rng.normal();
    r.a = rng.bernoulli(dgp.propensity(r.x)) ? 1.0 : 0.0;
    r.y = dgp.mean(r.x) + rng.normal();
  }
  return Dataset(Schema{dgp.dim, TreatmentKind::binary, false}, std::move(rows));
}

double true_qut_quantile(const QutDgp& dgp, std::span<const double> x, double quantile) {
  return dgp.mean(x) + normal_quantile(quantile);
}

namespace {

std::size_t draw_index(Rng& rng, std::span<const double> probs) {
  const double u = rng.uniform();
  double c = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    c += probs[k];
    if (u < c) return k;
  }
  return probs.size() - 1;
}

std::vector<double> normalized(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= s;
  return v;
}

double expectation(std::span<const double> support, std::span<const double> probs) {
  double m = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) m += support[k] * probs[k];
  return m;
}

}  // namespace

DiscreteCateDgp DiscreteCateDgp::standard() {
  DiscreteCateDgp d;
  d.atoms = {-1.0, -0.5, 0.0, 0.5, 1.0};
  d.px = {0.1, 0.2, 0.3, 0.25, 0.15};
  d.pi = {0.2, 0.35, 0.5, 0.65, 0.8};
  for (double x : d.atoms) d.y_support.push_back({x - 1.0, x, x + 2.0});
  d.y_prob_arm0 = {{0.3, 0.5, 0.2}, {0.4, 0.4, 0.2}, {0.25, 0.5, 0.25}, {0.2, 0.5, 0.3}, {0.35, 0.35, 0.3}};
  d.y_prob_arm1 = {{0.1, 0.4, 0.5}, {0.2, 0.3, 0.5}, {0.15, 0.45, 0.4}, {0.05, 0.35, 0.6}, {0.3, 0.3, 0.4}};
  return d;
}

DiscreteCateDgp DiscreteCateDgp::random(const SeedStream& seed, std::size_t atoms) {
  if (atoms == 0) throw Error(ErrorCategory::invalid_argument, "need at least one atom");
  Rng rng = seed.generator();
  DiscreteCateDgp d;
  std::vector<double> w;
  for (std::size_t j = 0; j < atoms; ++j) {
    d.atoms.push_back(0.5 * (static_cast<double>(j) - static_cast<double>(atoms - 1) / 2.0));
    w.push_back(rng.uniform(0.5, 1.5));
    d.pi.push_back(rng.uniform(0.15, 0.85));
    std::vector<double> s{rng.normal(), rng.normal(), rng.normal()};
    std::sort(s.begin(), s.end());
    d.y_support.push_back(s);
    d.y_prob_arm0.push_back(normalized({rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)}));
    d.y_prob_arm1.push_back(normalized({rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)}));
  }
  d.px = normalized(w);
  return d;
}

DiscreteOracle DiscreteCateDgp::to_oracle() const {
  std::vector<std::vector<double>> cov;
  std::vector<std::vector<OracleAtom>> cond;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    cov.push_back({atoms[j]});
    std::vector<OracleAtom> law;
    for (int arm = 0; arm < 2; ++arm) {
      const double pa = arm == 1 ? pi[j] : 1.0 - pi[j];
      const auto& probs = arm == 1 ? y_prob_arm1[j] : y_prob_arm0[j];
      for (std::size_t k = 0; k < y_support[j].size(); ++k) {
        law.push_back(OracleAtom{static_cast<double>(arm), 0.0, y_support[j][k], pa * probs[k]});
      }
    }
    cond.push_back(std::move(law));
  }
  return DiscreteOracle(std::move(cov), px, std::move(cond));
}

Dataset DiscreteCateDgp::sample(std::size_t n, const SeedStream& seed) const {
  Rng rng = seed.generator();
  std::vector<Observation> rows(n);
  for (auto& r : rows) {
    const std::size_t j = draw_index(rng, px);
    r.x = {atoms[j]};
    r.a = rng.bernoulli(pi[j]) ? 1.0 : 0.0;
    const auto& probs = r.a == 1.0 ? y_prob_arm1[j] : y_prob_arm0[j];
    r.y = y_support[j][draw_index(rng, probs)];
  }
  return Dataset(Schema{1, TreatmentKind::binary, false}, std::move(rows));
}

std::vector<double> DiscreteCateDgp::mu(int arm) const {
  std::vector<double> m(atoms.size());
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    m[j] = expectation(y_support[j], arm == 1 ? y_prob_arm1[j] : y_prob_arm0[j]);
  }
  return m;
}

std::vector<double> DiscreteCateDgp::theta0() const {
  const auto m0 = mu(0), m1 = mu(1);
  std::vector<double> t(atoms.size());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = m1[j] - m0[j];
  return t;
}

NuisanceSet DiscreteCateDgp::true_nuisances(const DiscreteOracle& oracle) const {
  return NuisanceSet(Effect::cate, {{"mu0", oracle.table_predictor(mu(0), "true mu0")},
                                    {"mu1", oracle.table_predictor(mu(1), "true mu1")},
                                    {"pi", oracle.table_predictor(pi, "true pi")}});
}

DiscreteComplianceDgp DiscreteComplianceDgp::standard() {
  DiscreteComplianceDgp d;
  d.atoms = {0.0, 1.0, 2.0, 3.0};
  d.px = {0.2, 0.3, 0.3, 0.2};
  d.pi0 = {0.3, 0.5, 0.6, 0.4};
  d.complier = {0.5, 0.6, 0.7, 0.4};
  d.always = {0.1, 0.15, 0.1, 0.2};
  d.y0 = {0.2, 0.3, 0.4, 0.5};
  d.effect = {0.3, 0.2, 0.25, 0.1};
  return d;
}

DiscreteOracle DiscreteComplianceDgp::to_oracle() const {
  std::vector<std::vector<double>> cov;
  std::vector<std::vector<OracleAtom>> cond;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    cov.push_back({atoms[j]});
    std::vector<OracleAtom> law;
    const double never = 1.0 - always[j] - complier[j];
    for (int d = 0; d < 2; ++d) {
      const double pd = d == 1 ? pi0[j] : 1.0 - pi0[j];
      // P(A = 1 | D = d): always-takers plus compliers when assigned.
      const double pa1 = always[j] + (d == 1 ? complier[j] : 0.0);
      const double pa[2] = {1.0 - pa1, pa1};
      (void)never;
      for (int a = 0; a < 2; ++a) {
        const double py1 = y0[j] + effect[j] * a;
        law.push_back(OracleAtom{static_cast<double>(a), static_cast<double>(d), 0.0, pd * pa[a] * (1.0 - py1)});
        law.push_back(OracleAtom{static_cast<double>(a), static_cast<double>(d), 1.0, pd * pa[a] * py1});
      }
    }
    cond.push_back(std::move(law));
  }
  return DiscreteOracle(std::move(cov), px, std::move(cond), true);
}

std::vector<double> DiscreteComplianceDgp::p0() const {
  std::vector<double> p(atoms.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = effect[j] * complier[j];
  return p;
}

std::vector<double> DiscreteComplianceDgp::q0() const { return complier; }

NuisanceSet DiscreteComplianceDgp::true_late_nuisances(const DiscreteOracle& oracle) const {
  return NuisanceSet(Effect::late_known_pi, {{"p", oracle.table_predictor(p0(), "true p")},
                                             {"q", oracle.table_predictor(q0(), "true q")},
                                             {"pi0", oracle.table_predictor(pi0, "known pi0")}});
}

NuisanceSet DiscreteComplianceDgp::true_late_iv_nuisances(const DiscreteOracle& oracle) const {
  std::vector<double> mu0 = y0, mu1(atoms.size()), pi(atoms.size());
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    mu1[j] = y0[j] + effect[j];
    pi[j] = always[j] + complier[j] * pi0[j];
  }
  return NuisanceSet(Effect::late_iv, {{"mu0", oracle.table_predictor(mu0, "true mu0")},
                                       {"mu1", oracle.table_predictor(mu1, "true mu1")},
                                       {"pi", oracle.table_predictor(pi, "true pi")},
                                       {"zeta_inst", oracle.table_predictor(pi0, "true zeta")}});
}

DiscreteQutDgp DiscreteQutDgp::standard() {
  DiscreteQutDgp d;
  d.atoms = {0.0, 1.0, 2.0, 3.0};
  d.px = {0.25, 0.25, 0.3, 0.2};
  d.pi = {0.3, 0.5, 0.7, 0.6};
  d.y_support = {0.0, 1.0, 2.0, 3.0, 4.0};
  d.y_prob = {{0.3, 0.3, 0.2, 0.1, 0.1},
              {0.1, 0.2, 0.4, 0.2, 0.1},
              {0.05, 0.15, 0.2, 0.3, 0.3},
              {0.2, 0.2, 0.2, 0.2, 0.2}};
  return d;
}

DiscreteOracle DiscreteQutDgp::to_oracle() const {
  std::vector<std::vector<double>> cov;
  std::vector<std::vector<OracleAtom>> cond;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    cov.push_back({atoms[j]});
    std::vector<OracleAtom> law;
    for (int a = 0; a < 2; ++a) {
      const double pa = a == 1 ? pi[j] : 1.0 - pi[j];
      for (std::size_t k = 0; k < y_support.size(); ++k) {
        law.push_back(OracleAtom{static_cast<double>(a), 0.0, y_support[k], pa * y_prob[j][k]});
      }
    }
    cond.push_back(std::move(law));
  }
  return DiscreteOracle(std::move(cov), px, std::move(cond));
}

NuisanceSet DiscreteQutDgp::nuisances(const DiscreteOracle& oracle, std::span<const double> f) const {
  std::vector<double> p(pi.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = 1.0 / pi[j];
  return NuisanceSet(Effect::qut, {{"p", oracle.table_predictor(p, "true p")},
                                   {"f", oracle.table_predictor(std::vector<double>(f.begin(), f.end()), "f")}});
}

double SyntheticCateDgp::propensity(std::span<const double> x) const {
  const double s = 0.8 * x[0] - 0.5 * x[1];
  return std::clamp(1.0 / (1.0 + std::exp(-s)), 0.1, 0.9);
}

double SyntheticCateDgp::mu0(std::span<const double> x) const { return x[0] + 0.5 * x[1] * x[1]; }

double SyntheticCateDgp::tau(std::span<const double> x) const {
  if (constant_effect) return 1.0;
  return 1.0 + x[0] + 0.5 * std::sin(std::numbers::pi * x[2]);
}

Dataset SyntheticCateDgp::sample(std::size_t n, const SeedStream& seed) const {
  if (dim < 3) throw Error(ErrorCategory::invalid_argument, "the synthetic CATE model needs 3 covariates");
  Rng rng = seed.generator();
  std::vector<Observation> rows(n);
  for (auto& r : rows) {
    r.x.resize(dim);
    for (auto& v : r.x) v = rng.uniform(-1.0, 1.0);
    r.a = rng.bernoulli(propensity(r.x)) ? 1.0 : 0.0;
    r.y = mu0(r.x) + r.a * tau(r.x) + noise * rng.normal();
  }
  return Dataset(Schema{dim, TreatmentKind::binary, false}, std::move(rows));
}

double AcdDgp::mu(double a, std::span<const double> x) const { return a * (1.0 + x[0]) + 0.5 * a * a + x[0]; }

double AcdDgp::dmu(double a, std::span<const double> x) const { return 1.0 + x[0] + a; }

double AcdDgp::score(double a) const { return 1.0 / a - 1.0 / (1.0 - a); }

double AcdDgp::theta0(std::span<const double> x) const { return 1.5 + x[0]; }

Dataset AcdDgp::sample(std::size_t n, const SeedStream& seed) const {
  Rng rng = seed.generator();
  std::vector<Observation> rows(n);
  for (auto& r : rows) {
    r.x.resize(dim);
    for (auto& v : r.x) v = rng.uniform(-1.0, 1.0);
    double u[3] = {rng.uniform_open(), rng.uniform_open(), rng.uniform_open()};
    std::sort(u, u + 3);
    r.a = std::min(u[1], 1.0 - 1e-12);
    r.y = mu(r.a, r.x) + noise * rng.normal();
  }
  return Dataset(Schema{dim, TreatmentKind::continuous, false}, std::move(rows));
}

NuisanceSet AcdDgp::true_nuisances() const {
  const AcdDgp self = *this;
  return NuisanceSet(Effect::acd,
                     {{"mu", Predictor("true mu", [self](std::span<const double> ax) { return self.mu(ax[0], ax.subspan(1)); })},
                      {"dmu", Predictor("true dmu", [self](std::span<const double> ax) { return self.dmu(ax[0], ax.subspan(1)); })},
                      {"score", Predictor("true score", [self](std::span<const double> ax) { return self.score(ax[0]); })}});
}

}  // namespace causalcal
