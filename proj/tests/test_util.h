#ifndef HYPERAUDIT_TESTS_TEST_UTIL_H_
#define HYPERAUDIT_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <unistd.h>
#include <span>
#include <string>
#include <vector>

#include "hyperaudit/forest.h"
#include "hyperaudit/random.h"

namespace hyperaudit::testing {

inline TreeNode Leaf(double cover, double value) {
  TreeNode n;
  n.cover = cover;
  n.value = value;
  return n;
}

// Single split on `feature`; children at indices 1 (left) and 2 (right).
inline Tree Stump(int feature, double threshold, double cover_left, double cover_right,
                  double value_left, double value_right) {
  Tree t;
  TreeNode root;
  root.feature = feature;
  root.threshold = threshold;
  root.left = 1;
  root.right = 2;
  root.cover = cover_left + cover_right;
  t.nodes = {root, Leaf(cover_left, value_left), Leaf(cover_right, value_right)};
  return t;
}

inline Forest MakeForest(std::vector<Tree> trees, std::size_t n_features) {
  Forest f;
  f.params.n_trees = static_cast<int>(trees.size());
  f.trees = std::move(trees);
  f.n_features = n_features;
  f.target_name = "test";
  return f;
}

// Random tree with integer covers over `features`. Children always carry at
// least one unit of cover, so the cover invariant holds exactly.
inline Tree RandomTree(Rng& rng, int max_depth, std::span<const int> features) {
  Tree t;
  std::function<int(int, int)> build = [&](int cover, int depth) {
    const int idx = static_cast<int>(t.nodes.size());
    t.nodes.push_back(Leaf(cover, rng.Normal(0.0, 3.0)));
    if (depth >= max_depth || cover < 2 || rng.Uniform() < 0.15) return idx;
    const int f = features[rng.Index(features.size())];
    const double thr = rng.Uniform();
    const int left_cover = 1 + static_cast<int>(rng.Index(cover - 1));
    const int left = build(left_cover, depth + 1);
    const int right = build(cover - left_cover, depth + 1);
    TreeNode& n = t.nodes[idx];
    n.feature = f;
    n.threshold = thr;
    n.left = left;
    n.right = right;
    return idx;
  };
  build(20 + static_cast<int>(rng.Index(200)), 0);
  return t;
}

// Independent reference for the path-dependent value function: recursive
// descent that follows x for features in the coalition and averages both
// branches by cover otherwise.
inline double ReferenceValue(const Tree& tree, std::span<const double> x,
                             const std::vector<bool>& in_set, int node = 0) {
  const TreeNode& n = tree.nodes[node];
  if (n.feature < 0) return n.value;
  if (in_set[n.feature]) {
    return ReferenceValue(tree, x, in_set, x[n.feature] < n.threshold ? n.left : n.right);
  }
  const TreeNode& l = tree.nodes[n.left];
  const TreeNode& r = tree.nodes[n.right];
  return (l.cover * ReferenceValue(tree, x, in_set, n.left) +
          r.cover * ReferenceValue(tree, x, in_set, n.right)) /
         n.cover;
}

// Textbook Shapley values over every feature of the forest (not only the
// used ones), with exact integer factorial weights. Small n only.
inline std::vector<double> ReferenceShapley(const Forest& forest, std::span<const double> x) {
  const int n = static_cast<int>(forest.n_features);
  auto value = [&](std::uint32_t mask) {
    std::vector<bool> in_set(n);
    for (int i = 0; i < n; ++i) in_set[i] = (mask >> i) & 1u;
    double sum = 0.0;
    for (const Tree& t : forest.trees) sum += ReferenceValue(t, x, in_set);
    return sum / static_cast<double>(forest.trees.size());
  };
  std::vector<double> fact(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
  std::vector<double> v(1u << n);
  for (std::uint32_t m = 0; m < (1u << n); ++m) v[m] = value(m);
  std::vector<double> phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      if ((m >> i) & 1u) continue;
      const int s = __builtin_popcount(m);
      const double w = fact[s] * fact[n - s - 1] / fact[n];
      phi[i] += w * (v[m | (1u << i)] - v[m]);
    }
  }
  return phi;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hyperaudit_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace hyperaudit::testing

#endif  // HYPERAUDIT_TESTS_TEST_UTIL_H_
