#include "causalcal/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causalcal/error.hpp"

namespace causalcal {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

std::vector<double> FeatureMatrix::row(std::size_t i) const {
  std::vector<double> r(cols_);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
  return r;
}

BoostedEnsemble::BoostedEnsemble(BoostObjective objective, double init,
                                 std::vector<std::vector<Node>> trees)
    : objective_(objective), init_(init), trees_(std::move(trees)) {}

double BoostedEnsemble::raw(std::span<const double> x) const {
  double f = init_;
  for (const auto& tree : trees_) {
    int k = 0;
    while (tree[static_cast<std::size_t>(k)].feature >= 0) {
      const auto& node = tree[static_cast<std::size_t>(k)];
      k = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    f += tree[static_cast<std::size_t>(k)].value;
  }
  return f;
}

double BoostedEnsemble::predict(std::span<const double> x) const {
  const double f = raw(x);
  if (objective_ == BoostObjective::logistic) return 1.0 / (1.0 + std::exp(-f));
  return f;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  std::vector<std::size_t> idx;
  idx.reserve(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w > 0.0) {
      idx.push_back(i);
      total += w;
    }
  }
  if (idx.empty()) throw Error(ErrorCategory::invalid_argument, "weighted quantile of empty set");
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double goal = q * total - 1e-12 * total;
  double cum = 0.0;
  for (std::size_t i : idx) {
    cum += weights.empty() ? 1.0 : weights[i];
    if (cum >= goal) return values[i];
  }
  return values[idx.back()];
}

namespace {

struct Candidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

double sigmoid(double f) { return 1.0 / (1.0 + std::exp(-f)); }

}  // namespace

BoostedEnsemble fit_boosted(const FeatureMatrix& features, std::span<const double> target,
                            std::span<const double> weights, BoostObjective objective,
                            const TreeParams& params, double quantile) {
  const std::size_t n_all = features.rows();
  if (target.size() != n_all || (!weights.empty() && weights.size() != n_all)) {
    throw Error(ErrorCategory::invalid_argument, "feature, target and weight sizes differ");
  }
  if (params.depth < 0 || params.rounds < 0 || params.learning_rate <= 0.0) {
    throw Error(ErrorCategory::invalid_argument, "invalid tree parameters");
  }
  // Rows with zero weight carry no loss and are dropped.
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n_all; ++i) {
    if (weights.empty() || weights[i] > 0.0) rows.push_back(i);
  }
  if (rows.empty()) throw Error(ErrorCategory::invalid_argument, "no rows with positive weight");
  const std::size_t n = rows.size();
  const std::size_t p = features.cols();
  std::vector<double> y(n), w(n);
  for (std::size_t r = 0; r < n; ++r) {
    y[r] = target[rows[r]];
    w[r] = weights.empty() ? 1.0 : weights[rows[r]];
    if (!std::isfinite(y[r])) throw Error(ErrorCategory::data_error, "non-finite target");
  }
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);

  double init = 0.0;
  switch (objective) {
    case BoostObjective::squared:
      for (std::size_t r = 0; r < n; ++r) init += w[r] * y[r];
      init /= wsum;
      break;
    case BoostObjective::logistic: {
      double m = 0.0;
      for (std::size_t r = 0; r < n; ++r) m += w[r] * y[r];
      m = std::clamp(m / wsum, 1e-6, 1.0 - 1e-6);
      init = std::log(m / (1.0 - m));
      break;
    }
    case BoostObjective::pinball:
      init = weighted_quantile(y, w, quantile);
      break;
  }

  std::vector<std::vector<BoostedEnsemble::Node>> trees;
  if (params.rounds == 0 || n < 2) return BoostedEnsemble(objective, init, std::move(trees));

  // Local column-major copy of the kept rows and per-feature sort orders.
  std::vector<double> xs(n * p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = features.column(j);
    for (std::size_t r = 0; r < n; ++r) xs[j * n + r] = col[rows[r]];
  }
  std::vector<std::vector<std::uint32_t>> order(p, std::vector<std::uint32_t>(n));
  for (std::size_t j = 0; j < p; ++j) {
    auto& o = order[j];
    std::iota(o.begin(), o.end(), 0U);
    const double* col = &xs[j * n];
    std::stable_sort(o.begin(), o.end(), [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }

  std::vector<double> F(n, init), grad(n), hess(n);
  std::vector<int> node_of(n);
  const std::size_t max_nodes = (std::size_t{1} << (params.depth + 1));
  std::vector<double> GL(max_nodes), HL(max_nodes), prev(max_nodes);
  std::vector<double> G(max_nodes), H(max_nodes);
  std::vector<std::size_t> cnt(max_nodes), cntL(max_nodes);
  std::vector<Candidate> best(max_nodes);
  std::vector<char> active(max_nodes);
  const double lambda = params.l2;

  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      switch (objective) {
        case BoostObjective::squared:
          grad[r] = w[r] * (F[r] - y[r]);
          hess[r] = w[r];
          break;
        case BoostObjective::logistic: {
          const double pr = sigmoid(F[r]);
          grad[r] = w[r] * (pr - y[r]);
          hess[r] = w[r] * std::max(pr * (1.0 - pr), 1e-12);
          break;
        }
        case BoostObjective::pinball:
          grad[r] = w[r] * ((y[r] <= F[r] ? 1.0 : 0.0) - quantile);
          hess[r] = w[r];
          break;
      }
    }

    std::vector<BoostedEnsemble::Node> tree(1);
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<int> frontier{0};
    for (int level = 0; level < params.depth && !frontier.empty(); ++level) {
      std::fill(active.begin(), active.end(), 0);
      for (int k : frontier) {
        const auto ku = static_cast<std::size_t>(k);
        active[ku] = 1;
        G[ku] = H[ku] = 0.0;
        cnt[ku] = 0;
        best[ku] = Candidate{};
      }
      for (std::size_t r = 0; r < n; ++r) {
        const auto k = static_cast<std::size_t>(node_of[r]);
        if (!active[k]) continue;
        G[k] += grad[r];
        H[k] += hess[r];
        ++cnt[k];
      }
      for (std::size_t j = 0; j < p; ++j) {
        for (int k : frontier) {
          const auto ku = static_cast<std::size_t>(k);
          GL[ku] = HL[ku] = 0.0;
          cntL[ku] = 0;
        }
        const double* col = &xs[j * n];
        for (std::uint32_t r : order[j]) {
          const auto k = static_cast<std::size_t>(node_of[r]);
          if (!active[k]) continue;
          const double v = col[r];
          if (cntL[k] > 0 && v > prev[k] && cntL[k] >= params.min_leaf &&
              cnt[k] - cntL[k] >= params.min_leaf) {
            const double gr = G[k] - GL[k];
            const double hr = H[k] - HL[k];
            const double gain = GL[k] * GL[k] / (HL[k] + lambda) + gr * gr / (hr + lambda) -
                                G[k] * G[k] / (H[k] + lambda);
            if (gain > best[k].gain + 1e-12) {
              double thr = prev[k] + (v - prev[k]) / 2.0;
              if (!(thr < v)) thr = prev[k];
              best[k] = Candidate{gain, static_cast<int>(j), thr};
            }
          }
          GL[k] += grad[r];
          HL[k] += hess[r];
          ++cntL[k];
          prev[k] = v;
        }
      }
      std::vector<int> next;
      for (int k : frontier) {
        const auto ku = static_cast<std::size_t>(k);
        if (best[ku].feature < 0) continue;
        const int left = static_cast<int>(tree.size());
        tree.emplace_back();
        tree.emplace_back();
        tree[ku].feature = best[ku].feature;
        tree[ku].threshold = best[ku].threshold;
        tree[ku].left = left;
        tree[ku].right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (next.empty()) break;
      for (std::size_t r = 0; r < n; ++r) {
        const auto& node = tree[static_cast<std::size_t>(node_of[r])];
        if (node.feature < 0) continue;
        node_of[r] = xs[static_cast<std::size_t>(node.feature) * n + r] <= node.threshold ? node.left
                                                                                           : node.right;
      }
      frontier = std::move(next);
    }

    // Leaf values.
    const std::size_t m = tree.size();
    if (objective == BoostObjective::pinball) {
      std::vector<std::vector<double>> res(m), rw(m);
      for (std::size_t r = 0; r < n; ++r) {
        const auto k = static_cast<std::size_t>(node_of[r]);
        res[k].push_back(y[r] - F[r]);
        rw[k].push_back(w[r]);
      }
      for (std::size_t k = 0; k < m; ++k) {
        if (tree[k].feature < 0 && !res[k].empty()) {
          tree[k].value = params.learning_rate * weighted_quantile(res[k], rw[k], quantile);
        }
      }
    } else {
      std::vector<double> g(m, 0.0), h(m, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        const auto k = static_cast<std::size_t>(node_of[r]);
        g[k] += grad[r];
        h[k] += hess[r];
      }
      for (std::size_t k = 0; k < m; ++k) {
        if (tree[k].feature < 0) tree[k].value = -params.learning_rate * g[k] / (h[k] + lambda);
      }
    }
    for (std::size_t r = 0; r < n; ++r) F[r] += tree[static_cast<std::size_t>(node_of[r])].value;
    trees.push_back(std::move(tree));
  }
  return BoostedEnsemble(objective, init, std::move(trees));
}

}  // namespace causalcal
