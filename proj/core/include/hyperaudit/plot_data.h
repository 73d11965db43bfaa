#ifndef HYPERAUDIT_PLOT_DATA_H_
#define HYPERAUDIT_PLOT_DATA_H_

#include <cstddef>
#include <vector>

#include "hyperaudit/features.h"
#include "hyperaudit/shap.h"

namespace hyperaudit {

struct DependencyPoint {
  double feature_value;
  double shap_value;
};

// One (feature value, phi) pair per sample in row order.
std::vector<DependencyPoint> DependencyData(const ShapMatrix& sm, const FeatureTable& table,
                                            int feature_id);

struct BeeswarmPoint {
  int sample_id;
  double percentile;  // average-rank percentile of the feature value, [0, 1]
  double shap_value;
};

struct BeeswarmFeature {
  int feature_id;
  double importance;
  std::vector<BeeswarmPoint> points;
};

// Top `top_m` features by global importance (descending, lower id first on
// ties). Percentile = average rank / (n - 1); a single sample maps to 0.5.
std::vector<BeeswarmFeature> BeeswarmData(const ShapMatrix& sm, const FeatureTable& table,
                                          std::size_t top_m);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_PLOT_DATA_H_
