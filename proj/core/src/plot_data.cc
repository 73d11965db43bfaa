#include "hyperaudit/plot_data.h"

#include <stdexcept>

#include "hyperaudit/aggregation.h"
#include "hyperaudit/stats.h"

namespace hyperaudit {
namespace {

void CheckAligned(const ShapMatrix& sm, const FeatureTable& table) {
  if (sm.n_samples != table.n_samples || sm.n_features != table.n_features()) {
    throw std::invalid_argument("shap matrix and feature table are not aligned");
  }
}

}  // namespace

std::vector<DependencyPoint> DependencyData(const ShapMatrix& sm, const FeatureTable& table,
                                            int feature_id) {
  CheckAligned(sm, table);
  if (feature_id < 0 || static_cast<std::size_t>(feature_id) >= sm.n_features) {
    throw std::out_of_range("invalid feature id");
  }
  std::vector<DependencyPoint> out;
  out.reserve(sm.n_samples);
  for (std::size_t r = 0; r < sm.n_samples; ++r) {
    out.push_back({table.At(r, feature_id), sm.At(r, feature_id)});
  }
  return out;
}

std::vector<BeeswarmFeature> BeeswarmData(const ShapMatrix& sm, const FeatureTable& table,
                                          std::size_t top_m) {
  CheckAligned(sm, table);
  if (top_m < 1 || top_m > sm.n_features) throw std::out_of_range("top_m out of range");
  const std::vector<double> imp = GlobalImportance(sm);
  const std::vector<int> order = RankByImportance(imp);
  const double denom = static_cast<double>(sm.n_samples) - 1.0;

  std::vector<BeeswarmFeature> out;
  for (std::size_t i = 0; i < top_m; ++i) {
    const int f = order[i];
    BeeswarmFeature block{f, imp[f], {}};
    const std::vector<double> ranks = AverageRanks(table.Column(f));
    for (std::size_t r = 0; r < sm.n_samples; ++r) {
      const double pct = sm.n_samples == 1 ? 0.5 : ranks[r] / denom;
      block.points.push_back({sm.sample_ids[r], pct, sm.At(r, f)});
    }
    out.push_back(std::move(block));
  }
  return out;
}

}  // namespace hyperaudit
