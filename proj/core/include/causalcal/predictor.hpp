#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace causalcal {

class Dataset;

/// Immutable real-valued function of a feature vector. Copies share the
/// underlying callable.
class Predictor {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  Predictor() = default;
  Predictor(std::string description, Fn fn);

  static Predictor constant(double value);

  double operator()(std::span<const double> x) const { return (*fn_)(x); }
  bool valid() const noexcept { return static_cast<bool>(fn_); }
  const std::string& description() const noexcept { return description_; }

 private:
  std::shared_ptr<const Fn> fn_;
  std::string description_;
};

/// Predictor evaluated on every row's covariates.
std::vector<double> predict_rows(const Predictor& p, const Dataset& data);

/// [a, x...]: the feature layout of components that depend on treatment.
std::vector<double> with_treatment(double a, std::span<const double> x);

}  // namespace causalcal
