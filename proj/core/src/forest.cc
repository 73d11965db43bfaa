#include "hyperaudit/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

#include "hyperaudit/errors.h"
#include "hyperaudit/parallel.h"
#include "hyperaudit/random.h"

namespace hyperaudit {
namespace {

// Reductions below this fraction of the node's sum of squares are rounding
// noise from the centered sums, not real structure.
constexpr double kMinRelativeReduction = 1e-12;
// Reductions closer than this (relative to the node SSE) count as equal, so
// rounding in the sums never decides between two identical partitions.
constexpr double kRelativeTieTolerance = 1e-9;

// Tie preference per column, keyed on what the feature is (transformation
// group, then band) rather than where it sits in the table. A projected or
// reordered table therefore resolves ties the same way as the original.
std::vector<int> TieRanks(const FeatureSchema& schema) {
  const std::size_t p = schema.size();
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  const auto key = [&](int f) {
    const FeatureEntry& e = schema.entries[f];
    return std::tuple(static_cast<int>(e.group), e.band.value_or(-1), f);
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
  std::vector<int> rank(p);
  for (std::size_t i = 0; i < p; ++i) rank[order[i]] = static_cast<int>(i);
  return rank;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double reduction = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureTable& table, std::span<const double> y, const ForestParams& params,
              std::span<const int> tie_rank, std::uint64_t tree_seed)
      : table_(table), y_(y), params_(params), tie_rank_(tie_rank), rng_(tree_seed) {
    const std::size_t p = table.n_features();
    n_candidates_ = static_cast<std::size_t>(
        std::ceil(params.features_per_split * static_cast<double>(p) - 1e-9));
    n_candidates_ = std::clamp<std::size_t>(n_candidates_, 1, p);
    feature_pool_.resize(p);
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
  }

  Tree Build() {
    const std::size_t n = table_.n_samples;
    weight_.assign(n, 0.0);
    if (params_.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) weight_[rng_.Index(n)] += 1.0;
    } else {
      std::fill(weight_.begin(), weight_.end(), 1.0);
    }
    std::vector<int> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight_[i] > 0.0) rows.push_back(static_cast<int>(i));
    }
    Grow(std::move(rows), 0);
    return Tree{std::move(nodes_)};
  }

 private:
  int Grow(std::vector<int> rows, int depth) {
    double w_sum = 0.0, wy_sum = 0.0;
    double y_min = y_[rows.front()], y_max = y_min;
    for (const int r : rows) {
      w_sum += weight_[r];
      wy_sum += weight_[r] * y_[r];
      y_min = std::min(y_min, y_[r]);
      y_max = std::max(y_max, y_[r]);
    }
    const int index = static_cast<int>(nodes_.size());
    TreeNode node;
    node.cover = w_sum;
    node.value = wy_sum / w_sum;
    nodes_.push_back(node);

    if (depth >= params_.max_depth || w_sum < 2.0 * params_.min_samples_leaf || y_min == y_max) {
      return index;
    }
    const SplitChoice split = FindSplit(rows, node.value);
    if (split.feature < 0) return index;

    std::vector<int> left, right;
    for (const int r : rows) {
      (table_.At(r, split.feature) < split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = Grow(std::move(left), depth + 1);
    const int rr = Grow(std::move(right), depth + 1);
    TreeNode& self = nodes_[index];
    self.feature = split.feature;
    self.threshold = split.threshold;
    self.left = l;
    self.right = rr;
    return index;
  }

  SplitChoice FindSplit(const std::vector<int>& rows, double mean) {
    // Draw candidate features without replacement (partial Fisher-Yates).
    const std::size_t p = feature_pool_.size();
    for (std::size_t i = 0; i < n_candidates_; ++i) {
      const std::size_t j = i + rng_.Index(p - i);
      std::swap(feature_pool_[i], feature_pool_[j]);
    }

    double w_total = 0.0, s_total = 0.0, q_total = 0.0;
    for (const int r : rows) {
      const double yc = y_[r] - mean;
      w_total += weight_[r];
      s_total += weight_[r] * yc;
      q_total += weight_[r] * yc * yc;
    }
    const double parent_term = s_total * s_total / w_total;
    const double min_leaf = params_.min_samples_leaf;

    const double tie = kRelativeTieTolerance * q_total;
    SplitChoice best;
    scratch_.resize(rows.size());
    for (std::size_t c = 0; c < n_candidates_; ++c) {
      const int f = feature_pool_[c];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        scratch_[i] = {table_.At(r, f), y_[r] - mean, weight_[r]};
      }
      std::sort(scratch_.begin(), scratch_.end(),
                [](const Item& a, const Item& b) { return a.x < b.x; });
      if (scratch_.front().x == scratch_.back().x) continue;

      double w_left = 0.0, s_left = 0.0;
      for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
        w_left += scratch_[i].w;
        s_left += scratch_[i].w * scratch_[i].yc;
        if (scratch_[i].x == scratch_[i + 1].x) continue;
        const double w_right = w_total - w_left;
        if (w_left < min_leaf || w_right < min_leaf) continue;
        const double s_right = s_total - s_left;
        const double reduction =
            s_left * s_left / w_left + s_right * s_right / w_right - parent_term;
        const bool better =
            best.feature < 0 ? reduction > 0.0
                             : reduction > best.reduction + tie ||
                                   (tie_rank_[f] < tie_rank_[best.feature] &&
                                    reduction >= best.reduction - tie);
        if (better) {
          double threshold = 0.5 * (scratch_[i].x + scratch_[i + 1].x);
          // Midpoint can round onto the lower value for adjacent doubles.
          if (!(threshold > scratch_[i].x)) threshold = scratch_[i + 1].x;
          best = {f, threshold, reduction};
        }
      }
    }
    if (best.feature >= 0 && !(best.reduction > kMinRelativeReduction * q_total)) {
      return {};
    }
    return best;
  }

  struct Item {
    double x;
    double yc;
    double w;
  };

  const FeatureTable& table_;
  std::span<const double> y_;
  const ForestParams& params_;
  std::span<const int> tie_rank_;
  Rng rng_;
  std::size_t n_candidates_ = 1;
  std::vector<int> feature_pool_;
  std::vector<double> weight_;
  std::vector<Item> scratch_;
  std::vector<TreeNode> nodes_;
};

double EvalNode(const Tree& tree, int index, std::span<const double> x,
                std::span<const std::uint8_t> in_set) {
  const TreeNode& node = tree.nodes[index];
  if (node.IsLeaf()) return node.value;
  if (in_set[node.feature]) {
    return EvalNode(tree, x[node.feature] < node.threshold ? node.left : node.right, x, in_set);
  }
  const TreeNode& l = tree.nodes[node.left];
  const TreeNode& r = tree.nodes[node.right];
  return (l.cover * EvalNode(tree, node.left, x, in_set) +
          r.cover * EvalNode(tree, node.right, x, in_set)) /
         node.cover;
}

int DepthFrom(const Tree& tree, int index) {
  const TreeNode& node = tree.nodes[index];
  if (node.IsLeaf()) return 0;
  return 1 + std::max(DepthFrom(tree, node.left), DepthFrom(tree, node.right));
}

}  // namespace

double Tree::Predict(std::span<const double> x) const {
  int i = 0;
  while (!nodes[i].IsLeaf()) {
    i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return nodes[i].value;
}

int Tree::Depth() const { return nodes.empty() ? 0 : DepthFrom(*this, 0); }

void ForestParams::Validate() const {
  if (n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  if (min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
  if (!(features_per_split > 0.0 && features_per_split <= 1.0)) {
    throw std::invalid_argument("features_per_split must lie in (0, 1]");
  }
}

double Forest::Predict(std::span<const double> x) const {
  if (x.size() != n_features) {
    throw std::invalid_argument("dimension mismatch: forest expects " + std::to_string(n_features) +
                                " features, got " + std::to_string(x.size()));
  }
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.Predict(x);
  return sum / static_cast<double>(trees.size());
}

std::vector<int> Forest::UsedFeatures() const {
  std::set<int> used;
  for (const Tree& t : trees) {
    for (const TreeNode& n : t.nodes) {
      if (!n.IsLeaf()) used.insert(n.feature);
    }
  }
  return {used.begin(), used.end()};
}

void Forest::Validate() const {
  if (trees.empty()) throw ValidationError("forest has no trees");
  if (!std::isfinite(baseline)) throw ValidationError("non-finite baseline");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto& nodes = trees[t].nodes;
    const std::string where = "tree " + std::to_string(t);
    if (nodes.empty()) throw ValidationError(where + ": no nodes");
    std::vector<int> parents(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const TreeNode& n = nodes[i];
      const std::string at = where + " node " + std::to_string(i);
      if (!(n.cover > 0.0) || !std::isfinite(n.cover)) throw ValidationError(at + ": cover must be positive");
      if (!std::isfinite(n.value)) throw ValidationError(at + ": non-finite value");
      if (n.IsLeaf()) {
        if (n.feature != -1 || n.left != -1 || n.right != -1) {
          throw ValidationError(at + ": malformed leaf");
        }
        continue;
      }
      if (static_cast<std::size_t>(n.feature) >= n_features) {
        throw ValidationError(at + ": feature id out of range");
      }
      if (!std::isfinite(n.threshold)) throw ValidationError(at + ": non-finite threshold");
      for (const int c : {n.left, n.right}) {
        if (c <= static_cast<int>(i) || c >= static_cast<int>(nodes.size())) {
          throw ValidationError(at + ": child index out of range");
        }
        ++parents[c];
      }
      if (nodes[n.left].cover + nodes[n.right].cover != n.cover) {
        throw ValidationError(at + ": cover invariant violated (children do not sum to parent)");
      }
    }
    if (parents[0] != 0) throw ValidationError(where + ": root has a parent");
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (parents[i] != 1) throw ValidationError(where + ": node " + std::to_string(i) + " is not a tree node");
    }
  }
}

Forest FitForest(const FeatureTable& table, std::span<const double> y, const ForestParams& params,
                 std::string target_name) {
  params.Validate();
  if (table.n_samples == 0 || table.n_features() == 0) {
    throw std::invalid_argument("cannot fit a forest on an empty table");
  }
  if (y.size() != table.n_samples) throw std::invalid_argument("target length does not match table rows");
  for (const double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite target value");
  }

  Forest forest;
  forest.params = params;
  forest.target_name = std::move(target_name);
  forest.schema_fingerprint = table.schema.Fingerprint();
  forest.n_features = table.n_features();
  forest.baseline = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  forest.trees.resize(params.n_trees);
  const std::vector<int> tie_rank = TieRanks(table.schema);
  ParallelFor(forest.trees.size(), [&](std::size_t t) {
    TreeBuilder builder(table, y, params, tie_rank, MixSeed(params.seed, t));
    forest.trees[t] = builder.Build();
  });
  return forest;
}

std::vector<double> PredictTable(const Forest& forest, const FeatureTable& table) {
  std::vector<double> out(table.n_samples);
  for (std::size_t r = 0; r < table.n_samples; ++r) out[r] = forest.Predict(table.Row(r));
  return out;
}

double EvalConditional(const Tree& tree, std::span<const double> x,
                       std::span<const std::uint8_t> in_set) {
  return EvalNode(tree, 0, x, in_set);
}

double EvalConditional(const Forest& forest, std::span<const double> x,
                       std::span<const std::uint8_t> in_set) {
  double sum = 0.0;
  for (const Tree& t : forest.trees) sum += EvalConditional(t, x, in_set);
  return sum / static_cast<double>(forest.trees.size());
}

std::uint64_t TargetSeed(std::uint64_t master_seed, Target t) {
  return master_seed + 1000003ULL * (static_cast<std::uint64_t>(t) + 1);
}

}  // namespace hyperaudit
