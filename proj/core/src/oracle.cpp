#include "causalcal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "causalcal/error.hpp"

namespace causalcal {

DiscreteOracle::DiscreteOracle(std::vector<std::vector<double>> covariates, std::vector<double> px,
                               std::vector<std::vector<OracleAtom>> conditional, bool has_instrument)
    : covariates_(std::move(covariates)),
      px_(std::move(px)),
      conditional_(std::move(conditional)),
      has_instrument_(has_instrument) {
  if (px_.empty() || covariates_.size() != px_.size() || conditional_.size() != px_.size()) {
    throw Error(ErrorCategory::invalid_argument, "oracle tables have inconsistent sizes");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < px_.size(); ++i) {
    if (px_[i] < 0.0) throw Error(ErrorCategory::invalid_argument, "negative covariate probability");
    if (covariates_[i].size() != covariates_[0].size()) {
      throw Error(ErrorCategory::invalid_argument, "covariate atoms differ in dimension");
    }
    total += px_[i];
    double cond = 0.0;
    for (const auto& atom : conditional_[i]) {
      if (atom.prob < 0.0) throw Error(ErrorCategory::invalid_argument, "negative conditional probability");
      cond += atom.prob;
    }
    if (std::abs(cond - 1.0) > 1e-12) {
      throw Error(ErrorCategory::invalid_argument,
                  "conditional law " + std::to_string(i) + " sums to " + std::to_string(cond));
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCategory::invalid_argument, "covariate probabilities sum to " + std::to_string(total));
  }
}

DiscreteOracle DiscreteOracle::from_json(const nlohmann::json& j) {
  try {
    std::vector<std::vector<double>> cov = j.at("covariates").get<std::vector<std::vector<double>>>();
    std::vector<double> px = j.at("px").get<std::vector<double>>();
    const bool inst = j.value("has_instrument", false);
    std::vector<std::vector<OracleAtom>> cond;
    for (const auto& law : j.at("conditional")) {
      std::vector<OracleAtom> atoms;
      for (const auto& a : law) {
        atoms.push_back(OracleAtom{a.at("a").get<double>(), a.value("d", 0.0), a.at("y").get<double>(),
                                   a.at("prob").get<double>()});
      }
      cond.push_back(std::move(atoms));
    }
    return DiscreteOracle(std::move(cov), std::move(px), std::move(cond), inst);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::config_error, std::string("oracle description: ") + e.what());
  }
}

nlohmann::json DiscreteOracle::to_json() const {
  nlohmann::json j;
  j["covariates"] = covariates_;
  j["px"] = px_;
  j["has_instrument"] = has_instrument_;
  nlohmann::json cond = nlohmann::json::array();
  for (const auto& law : conditional_) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : law) {
      nlohmann::json atom{{"a", a.a}, {"y", a.y}, {"prob", a.prob}};
      if (has_instrument_) atom["d"] = a.d;
      arr.push_back(atom);
    }
    cond.push_back(arr);
  }
  j["conditional"] = cond;
  return j;
}

Observation DiscreteOracle::observation(std::size_t i, const OracleAtom& atom) const {
  Observation o;
  o.x = covariates_[i];
  o.a = atom.a;
  if (has_instrument_) o.d = atom.d;
  o.y = atom.y;
  return o;
}

double DiscreteOracle::conditional_mean(std::size_t i,
                                        const std::function<double(const Observation&)>& h) const {
  double v = 0.0;
  for (const auto& atom : conditional_[i]) {
    if (atom.prob == 0.0) continue;
    v += atom.prob * h(observation(i, atom));
  }
  return v;
}

std::size_t DiscreteOracle::index_of(std::span<const double> x) const {
  for (std::size_t i = 0; i < covariates_.size(); ++i) {
    const auto& c = covariates_[i];
    if (c.size() == x.size() && std::equal(c.begin(), c.end(), x.begin())) return i;
  }
  throw Error(ErrorCategory::invalid_argument, "covariate value is not on the oracle support");
}

Predictor DiscreteOracle::table_predictor(std::vector<double> values, std::string description) const {
  if (values.size() != support_size()) {
    throw Error(ErrorCategory::invalid_argument, "table size does not match the oracle support");
  }
  auto cov = std::make_shared<const std::vector<std::vector<double>>>(covariates_);
  auto vals = std::make_shared<const std::vector<double>>(std::move(values));
  return Predictor(std::move(description), [cov, vals](std::span<const double> x) {
    for (std::size_t i = 0; i < cov->size(); ++i) {
      const auto& c = (*cov)[i];
      if (c.size() == x.size() && std::equal(c.begin(), c.end(), x.begin())) return (*vals)[i];
    }
    throw Error(ErrorCategory::invalid_argument, "covariate value is not on the oracle support");
  });
}

Predictor DiscreteOracle::treatment_table_predictor(std::vector<double> at_a0, std::vector<double> at_a1,
                                                    std::string description) const {
  const Predictor p0 = table_predictor(std::move(at_a0));
  const Predictor p1 = table_predictor(std::move(at_a1));
  return Predictor(std::move(description), [p0, p1](std::span<const double> ax) {
    const auto x = ax.subspan(1);
    return ax[0] == 1.0 ? p1(x) : p0(x);
  });
}

DiscreteLossOracle::DiscreteLossOracle(const DiscreteOracle& oracle, LossSpec spec, NuisanceSet g)
    : oracle_(oracle), spec_(spec), g_(std::move(g)) {}

double DiscreteLossOracle::expected_loss(std::size_t i, double nu) const {
  return oracle_.conditional_mean(i, [&](const Observation& z) { return bind_loss(spec_, g_, z).value(nu); });
}

double DiscreteLossOracle::expected_derivative(std::size_t i, double nu) const {
  return oracle_.conditional_mean(i,
                                  [&](const Observation& z) { return bind_loss(spec_, g_, z).derivative(nu); });
}

GaussianQutOracle::GaussianQutOracle(std::vector<double> means, std::vector<double> pi0,
                                     std::vector<double> p, std::vector<double> f, double quantile)
    : means_(std::move(means)), pi0_(std::move(pi0)), p_(std::move(p)), f_(std::move(f)), quantile_(quantile) {
  const std::size_t n = means_.size();
  if (pi0_.size() != n || p_.size() != n || f_.size() != n) {
    throw Error(ErrorCategory::invalid_argument, "Gaussian oracle tables differ in size");
  }
}

double GaussianQutOracle::expected_loss(std::size_t i, double nu) const {
  const double u = nu - means_[i];
  const double cdf = 0.5 * std::erfc(-u / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  const double pinball = u * (cdf - quantile_) + pdf;
  const double corr = pi0_[i] * p_[i] * (f_[i] - quantile_) - f_[i] + quantile_;
  return pi0_[i] * p_[i] * pinball - nu * corr;
}

}  // namespace causalcal
