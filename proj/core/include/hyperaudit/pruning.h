#ifndef HYPERAUDIT_PRUNING_H_
#define HYPERAUDIT_PRUNING_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hyperaudit/dataset.h"
#include "hyperaudit/features.h"
#include "hyperaudit/forest.h"

namespace hyperaudit {

// Fixed k ladder searched by MinimalK (capped at the feature count).
inline constexpr std::array<int, 8> kPruneLadder = {1, 2, 3, 5, 8, 13, 21, 34};

// Offset added to the forest seed for the pruned refit, so the pruned and
// full models do not share bootstrap draws.
inline constexpr std::uint64_t kRefitSeedOffset = 0x5eed;

// The k largest importances, in descending order; ties go to the lower id.
// Throws std::out_of_range unless 1 <= k <= importance.size().
std::vector<int> SelectTopK(std::span<const double> importance, std::size_t k);

// Table restricted to `ids` (in that order). Schema entries keep their group
// and band but are renumbered 0..k-1, so the fingerprint changes.
FeatureTable ProjectColumns(const FeatureTable& table, std::span<const int> ids);

// Inputs shared by every pruning call: a table covering both splits, the
// target column aligned with its rows and the split label of each row.
struct PruningProblem {
  const FeatureTable& table;
  std::span<const double> y;
  std::span<const Split> split;
  std::string target_name;
};

// Full-feature model fitted and explained on the train rows only.
struct FullModelFit {
  Forest forest;
  std::vector<double> importance;  // global importance on the train split
  double baseline_mae = 0.0;       // test-split MAE
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

FullModelFit FitFullModel(const PruningProblem& problem, const ForestParams& params);

struct PruneResult {
  std::string target_name;
  std::vector<int> selected_ids;
  std::size_t k = 0;
  std::size_t full_feature_count = 0;
  double baseline_mae = 0.0;
  double pruned_mae = 0.0;
  // pruned_mae / baseline_mae. When the baseline MAE is exactly 0 the ratio is
  // 1 for a pruned MAE of 0 and +inf otherwise.
  double ratio = 0.0;
  std::uint64_t fit_seed = 0;
  std::uint64_t refit_seed = 0;
  std::string selection_hash;  // hash of the train importances and selection
};

// Retrains on the top-k features of `full` and scores both models on test.
PruneResult EvaluatePruned(const PruningProblem& problem, const FullModelFit& full, std::size_t k,
                           const ForestParams& params);

// Whole pipeline: fit full model on train, explain on train, select top-k,
// refit on the projection, compare test MAE. Test targets never influence
// the selection. Throws std::invalid_argument for an empty test split.
PruneResult PruneAndRetrain(const PruningProblem& problem, std::size_t k, const ForestParams& params);
PruneResult PruneAndRetrain(const Dataset& ds, const FeatureTable& table, Target target,
                            std::size_t k, const ForestParams& params);

struct MinimalKResult {
  std::optional<std::size_t> k;     // first ladder k with ratio <= 1 + tol
  std::vector<PruneResult> ladder;  // every evaluated ladder point, ascending k
};

// Evaluates every ladder point (capped at n_features) and reports the first
// passing one. Throws std::invalid_argument unless tol > 0.
MinimalKResult MinimalK(const PruningProblem& problem, const ForestParams& params, double tol,
                        std::span<const int> ladder = kPruneLadder);
MinimalKResult MinimalK(const Dataset& ds, const FeatureTable& table, Target target,
                        const ForestParams& params, double tol,
                        std::span<const int> ladder = kPruneLadder);

// Table-style percent delta: "+3%", "0%", "-2%".
std::string FormatPercentDelta(double ratio);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_PRUNING_H_
