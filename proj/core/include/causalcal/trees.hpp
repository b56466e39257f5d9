#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace causalcal {

/// Dense column-major feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& at(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double at(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }
  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::vector<double> row(std::size_t i) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class BoostObjective { squared, logistic, pinball };

struct TreeParams {
  int depth = 3;
  int rounds = 100;
  double learning_rate = 0.1;
  std::size_t min_leaf = 5;
  double l2 = 1.0;
};

/// Gradient-boosted regression trees with exact greedy splits.
///
/// Squared and logistic objectives use second-order leaf values
/// -G / (H + l2). The pinball objective grows the tree on its gradient and
/// then sets each leaf to the weighted Q-quantile of the current residuals.
class BoostedEnsemble {
 public:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  BoostedEnsemble() = default;
  BoostedEnsemble(BoostObjective objective, double init, std::vector<std::vector<Node>> trees);

  /// Additive score; for the logistic objective this is the log-odds.
  double raw(std::span<const double> x) const;
  /// raw() mapped through the objective's link (sigmoid for logistic).
  double predict(std::span<const double> x) const;

  BoostObjective objective() const noexcept { return objective_; }
  double init() const noexcept { return init_; }
  std::size_t num_trees() const noexcept { return trees_.size(); }

 private:
  BoostObjective objective_ = BoostObjective::squared;
  double init_ = 0.0;
  std::vector<std::vector<Node>> trees_;
};

/// `weights` may be empty (unit weights). `quantile` is used by the pinball
/// objective only.
BoostedEnsemble fit_boosted(const FeatureMatrix& features, std::span<const double> target,
                            std::span<const double> weights, BoostObjective objective,
                            const TreeParams& params, double quantile = 0.5);

/// Smallest v among `values` whose cumulative weight (ascending order)
/// reaches q * total weight. Zero-weight entries are ignored.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

}  // namespace causalcal
