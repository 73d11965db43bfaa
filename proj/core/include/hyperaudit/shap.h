#ifndef HYPERAUDIT_SHAP_H_
#define HYPERAUDIT_SHAP_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hyperaudit/features.h"
#include "hyperaudit/forest.h"

namespace hyperaudit {

// Per-sample, per-feature attributions phi_i(x_j) with a shared base value
// v_empty. Row j satisfies base_value + sum_i phi = prediction(x_j).
struct ShapMatrix {
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  std::vector<double> values;  // row-major
  double base_value = 0.0;
  std::vector<int> sample_ids;
  std::string schema_fingerprint;

  std::span<const double> Row(std::size_t r) const {
    return {values.data() + r * n_features, n_features};
  }
  std::span<double> Row(std::size_t r) { return {values.data() + r * n_features, n_features}; }
  double At(std::size_t r, std::size_t f) const { return values[r * n_features + f]; }
};

// Largest number of distinct used features the enumeration oracle accepts.
inline constexpr std::size_t kMaxOracleFeatures = 20;

// Shapley values by explicit enumeration of every coalition of the features
// the forest actually splits on, with v_S from EvalConditional. Features the
// forest never uses get exactly 0. Exponential; throws OracleIntractableError
// ("oracle intractable") when more than kMaxOracleFeatures features are used.
std::vector<double> BruteShap(const Forest& forest, std::span<const double> x);

// Polynomial-time path-dependent TreeSHAP for a single tree.
std::vector<double> TreeShap(const Tree& tree, std::span<const double> x, std::size_t n_features);

// Forest attribution: mean of the per-tree attributions.
std::vector<double> TreeShap(const Forest& forest, std::span<const double> x);

// v_empty of the forest: the cover-weighted mean leaf value, averaged over
// trees. Independent of x.
double BaseValue(const Forest& forest);

// Explains every row of `table`. The table schema must match the forest's
// fingerprint (ValidationError otherwise).
ShapMatrix ExplainDataset(const Forest& forest, const FeatureTable& table);

// Largest |base + sum(phi) - prediction| / max(1, |prediction|) over rows.
double MaxAdditivityError(const ShapMatrix& sm, const Forest& forest, const FeatureTable& table);

// Throws InvariantError if MaxAdditivityError exceeds `relative_tolerance`.
void CheckAdditivity(const ShapMatrix& sm, const Forest& forest, const FeatureTable& table,
                     double relative_tolerance = 1e-6);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_SHAP_H_
