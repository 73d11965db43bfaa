#include "hyperaudit/shap.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hyperaudit/errors.h"
#include "hyperaudit/parallel.h"

namespace hyperaudit {
namespace {

void CheckDimension(const Forest& forest, std::span<const double> x) {
  if (x.size() != forest.n_features) {
    throw std::invalid_argument("dimension mismatch: forest expects " +
                                std::to_string(forest.n_features) + " features, got " +
                                std::to_string(x.size()));
  }
}

// One element of the feature path kept by TreeSHAP: the fraction of
// "zero" (feature missing) and "one" (feature present) paths flowing through,
// and the permutation weight of subsets of each size.
struct PathElement {
  int feature;
  double zero_fraction;
  double one_fraction;
  double weight;
};

using Path = std::vector<PathElement>;

void ExtendPath(Path& path, double zero_fraction, double one_fraction, int feature) {
  const std::size_t n = path.size();
  path.push_back({feature, zero_fraction, one_fraction, n == 0 ? 1.0 : 0.0});
  const double denom = static_cast<double>(n + 1);
  for (std::size_t ii = n; ii-- > 0;) {
    const double i = static_cast<double>(ii);
    path[ii + 1].weight += one_fraction * path[ii].weight * (i + 1) / denom;
    path[ii].weight = zero_fraction * path[ii].weight * (static_cast<double>(n) - i) / denom;
  }
}

// Removes element `index`, undoing its ExtendPath.
void UnwindPath(Path& path, std::size_t index) {
  const std::size_t n = path.size() - 1;
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  const double denom = static_cast<double>(n + 1);
  double next_one = path[n].weight;
  for (std::size_t jj = n; jj-- > 0;) {
    const double j = static_cast<double>(jj);
    if (one_fraction != 0.0) {
      const double tmp = path[jj].weight;
      path[jj].weight = next_one * denom / ((j + 1) * one_fraction);
      next_one = tmp - path[jj].weight * zero_fraction * (static_cast<double>(n) - j) / denom;
    } else {
      path[jj].weight = path[jj].weight * denom / (zero_fraction * (static_cast<double>(n) - j));
    }
  }
  for (std::size_t j = index; j < n; ++j) {
    path[j].feature = path[j + 1].feature;
    path[j].zero_fraction = path[j + 1].zero_fraction;
    path[j].one_fraction = path[j + 1].one_fraction;
  }
  path.pop_back();
}

// Total permutation weight the path would have with element `index` unwound.
double UnwoundPathSum(const Path& path, std::size_t index) {
  const std::size_t n = path.size() - 1;
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  const double denom = static_cast<double>(n + 1);
  double next_one = path[n].weight;
  double total = 0.0;
  for (std::size_t jj = n; jj-- > 0;) {
    const double j = static_cast<double>(jj);
    if (one_fraction != 0.0) {
      const double tmp = next_one * denom / ((j + 1) * one_fraction);
      total += tmp;
      next_one = path[jj].weight - tmp * zero_fraction * (static_cast<double>(n) - j) / denom;
    } else {
      total += path[jj].weight / (zero_fraction * (static_cast<double>(n) - j) / denom);
    }
  }
  return total;
}

void Recurse(const Tree& tree, int node_index, std::span<const double> x, Path path,
             double zero_fraction, double one_fraction, int feature, std::span<double> phi) {
  ExtendPath(path, zero_fraction, one_fraction, feature);
  const TreeNode& node = tree.nodes[node_index];

  if (node.IsLeaf()) {
    for (std::size_t i = 1; i < path.size(); ++i) {
      const double w = UnwoundPathSum(path, i);
      const PathElement& e = path[i];
      phi[e.feature] += w * (e.one_fraction - e.zero_fraction) * node.value;
    }
    return;
  }

  const bool goes_left = x[node.feature] < node.threshold;
  const int hot = goes_left ? node.left : node.right;
  const int cold = goes_left ? node.right : node.left;
  const double hot_zero = tree.nodes[hot].cover / node.cover;
  const double cold_zero = tree.nodes[cold].cover / node.cover;

  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  // A feature split on twice along one path keeps a single path element.
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path[k].feature == node.feature) {
      incoming_zero = path[k].zero_fraction;
      incoming_one = path[k].one_fraction;
      UnwindPath(path, k);
      break;
    }
  }

  Recurse(tree, hot, x, path, hot_zero * incoming_zero, incoming_one, node.feature, phi);
  Recurse(tree, cold, x, std::move(path), cold_zero * incoming_zero, 0.0, node.feature, phi);
}

}  // namespace

std::vector<double> BruteShap(const Forest& forest, std::span<const double> x) {
  CheckDimension(forest, x);
  const std::vector<int> used = forest.UsedFeatures();
  const std::size_t m = used.size();
  if (m > kMaxOracleFeatures) {
    throw OracleIntractableError("oracle intractable: forest uses " + std::to_string(m) +
                                 " features, limit is " + std::to_string(kMaxOracleFeatures));
  }
  std::vector<double> phi(forest.n_features, 0.0);
  if (m == 0) return phi;

  // v_S for every coalition S of used features, indexed by bitmask.
  const std::size_t n_coalitions = std::size_t{1} << m;
  std::vector<double> value(n_coalitions);
  std::vector<std::uint8_t> in_set(forest.n_features, 0);
  for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
    for (std::size_t b = 0; b < m; ++b) in_set[used[b]] = (mask >> b) & 1u;
    value[mask] = EvalConditional(forest, x, in_set);
  }

  // |S|! (m - |S| - 1)! / m!, in log space.
  std::vector<double> weight(m);
  const double log_m_fact = std::lgamma(static_cast<double>(m) + 1.0);
  for (std::size_t s = 0; s < m; ++s) {
    weight[s] = std::exp(std::lgamma(static_cast<double>(s) + 1.0) +
                         std::lgamma(static_cast<double>(m - s)) - log_m_fact);
  }

  for (std::size_t b = 0; b < m; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    double sum = 0.0;
    for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
      if (mask & bit) continue;
      sum += weight[std::popcount(mask)] * (value[mask | bit] - value[mask]);
    }
    phi[used[b]] = sum;
  }
  return phi;
}

std::vector<double> TreeShap(const Tree& tree, std::span<const double> x, std::size_t n_features) {
  std::vector<double> phi(n_features, 0.0);
  Path path;
  path.reserve(16);
  Recurse(tree, 0, x, std::move(path), 1.0, 1.0, -1, phi);
  return phi;
}

std::vector<double> TreeShap(const Forest& forest, std::span<const double> x) {
  CheckDimension(forest, x);
  std::vector<double> phi(forest.n_features, 0.0);
  for (const Tree& tree : forest.trees) {
    Path path;
    path.reserve(16);
    Recurse(tree, 0, x, std::move(path), 1.0, 1.0, -1, phi);
  }
  const double n_trees = static_cast<double>(forest.trees.size());
  for (double& v : phi) v /= n_trees;
  return phi;
}

double BaseValue(const Forest& forest) {
  const std::vector<double> x(forest.n_features, 0.0);
  const std::vector<std::uint8_t> empty(forest.n_features, 0);
  return EvalConditional(forest, x, empty);
}

ShapMatrix ExplainDataset(const Forest& forest, const FeatureTable& table) {
  if (table.schema.Fingerprint() != forest.schema_fingerprint ||
      table.n_features() != forest.n_features) {
    throw ValidationError("schema fingerprint mismatch: forest was trained on " +
                          forest.schema_fingerprint + ", table has " +
                          table.schema.Fingerprint());
  }
  ShapMatrix sm;
  sm.n_samples = table.n_samples;
  sm.n_features = table.n_features();
  sm.values.assign(sm.n_samples * sm.n_features, 0.0);
  sm.base_value = BaseValue(forest);
  sm.sample_ids = table.sample_ids;
  sm.schema_fingerprint = forest.schema_fingerprint;
  ParallelFor(table.n_samples, [&](std::size_t r) {
    const std::vector<double> phi = TreeShap(forest, table.Row(r));
    std::copy(phi.begin(), phi.end(), sm.Row(r).begin());
  });
  return sm;
}

double MaxAdditivityError(const ShapMatrix& sm, const Forest& forest, const FeatureTable& table) {
  if (sm.n_samples != table.n_samples || sm.n_features != table.n_features()) {
    throw std::invalid_argument("shap matrix does not match table shape");
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < sm.n_samples; ++r) {
    const double pred = forest.Predict(table.Row(r));
    double total = sm.base_value;
    for (const double v : sm.Row(r)) total += v;
    worst = std::max(worst, std::abs(total - pred) / std::max(1.0, std::abs(pred)));
  }
  return worst;
}

void CheckAdditivity(const ShapMatrix& sm, const Forest& forest, const FeatureTable& table,
                     double relative_tolerance) {
  const double err = MaxAdditivityError(sm, forest, table);
  if (!(err <= relative_tolerance)) {
    throw InvariantError("Shapley additivity violated: relative error " + std::to_string(err) +
                         " exceeds " + std::to_string(relative_tolerance));
  }
}

}  // namespace hyperaudit
