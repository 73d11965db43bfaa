#ifndef HYPERAUDIT_FOREST_H_
#define HYPERAUDIT_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hyperaudit/features.h"

namespace hyperaudit {

// Array-encoded CART node. Leaves have feature == -1. `cover` is the
// bootstrap-weighted count of training rows reaching the node; the children
// of an internal node always sum exactly to it.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double cover = 0.0;
  // Leaf prediction. Internal nodes keep their (unused) training mean.
  double value = 0.0;

  bool IsLeaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

// nodes[0] is the root. x[feature] < threshold goes left; ties go right.
struct Tree {
  std::vector<TreeNode> nodes;

  double Predict(std::span<const double> x) const;
  int Depth() const;
  bool operator==(const Tree&) const = default;
};

struct ForestParams {
  int n_trees = 200;
  int max_depth = 12;
  int min_samples_leaf = 2;
  double features_per_split = 0.33;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void Validate() const;
  bool operator==(const ForestParams&) const = default;
};

struct Forest {
  std::vector<Tree> trees;
  double baseline = 0.0;  // mean of the training targets
  ForestParams params;
  std::string target_name;
  std::string schema_fingerprint;
  std::size_t n_features = 0;

  // Mean of per-tree leaf values. Throws std::invalid_argument on a
  // dimension mismatch.
  double Predict(std::span<const double> x) const;

  // Sorted ids of features used by at least one split.
  std::vector<int> UsedFeatures() const;

  // Structural checks used after deserialization; throws ValidationError.
  void Validate() const;

  bool operator==(const Forest&) const = default;
};

// Trains one regression forest. Deterministic in params.seed: tree t draws
// from its own stream seeded by (seed, t), so thread scheduling cannot change
// the result.
Forest FitForest(const FeatureTable& table, std::span<const double> y, const ForestParams& params,
                 std::string target_name = {});

std::vector<double> PredictTable(const Forest& forest, const FeatureTable& table);

// Path-dependent conditional expectation of one tree with the features
// flagged in `in_set` (size n_features, nonzero = fixed to x) conditioned on,
// and the remaining features integrated out using node covers.
double EvalConditional(const Tree& tree, std::span<const double> x,
                       std::span<const std::uint8_t> in_set);

// Mean of EvalConditional over the trees.
double EvalConditional(const Forest& forest, std::span<const double> x,
                       std::span<const std::uint8_t> in_set);

// Seed for the forest of target t, derived from a master seed by a fixed
// per-target offset.
std::uint64_t TargetSeed(std::uint64_t master_seed, Target t);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_FOREST_H_
