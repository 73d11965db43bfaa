#ifndef HYPERAUDIT_AGGREGATION_H_
#define HYPERAUDIT_AGGREGATION_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperaudit/features.h"
#include "hyperaudit/shap.h"

namespace hyperaudit {

// imp(i) = sum over samples of |phi_i|. A sum, not a mean.
std::vector<double> GlobalImportance(const ShapMatrix& sm);

// Feature ids by descending importance; equal values keep the lower id first.
std::vector<int> RankByImportance(std::span<const double> importance);

// Named, pairwise disjoint feature-id sets.
class GroupMap {
 public:
  struct Group {
    std::string name;
    std::vector<int> ids;
  };

  // Throws std::invalid_argument on overlapping groups or ids >= n_features.
  static GroupMap Create(std::vector<Group> groups, std::size_t n_features);
  // One group per transformation family present in the schema.
  static GroupMap ByTransformation(const FeatureSchema& schema);
  // One group per band ("band_<i>") plus "nonspectral" when present.
  static GroupMap ByBand(const FeatureSchema& schema);

  const std::vector<Group>& groups() const { return groups_; }
  std::size_t n_features() const { return n_features_; }
  // True iff the union of the groups is every feature id.
  bool coverage() const { return coverage_; }

 private:
  std::vector<Group> groups_;
  std::size_t n_features_ = 0;
  bool coverage_ = false;
};

// phi_F(x) = sum_{i in F} phi_i(x) for each group F, in group order.
std::vector<double> GroupAttribution(std::span<const double> phi_row, const GroupMap& groups);

enum class GroupImportanceMode {
  // sum_j |sum_{i in F} phi_i(x_j)|: attribution of the group as a whole.
  kAbsOfGroupSum,
  // sum_j sum_{i in F} |phi_i(x_j)|: summed per-feature importance.
  kSumOfAbs,
};

struct GroupImportance {
  TransformationGroup group;
  std::size_t n_features;
  double importance;
};

// One entry per transformation group present in the schema, in extraction
// order. Throws ValidationError on a fingerprint mismatch.
std::vector<GroupImportance> TransformationImportance(
    const ShapMatrix& sm, const FeatureSchema& schema,
    GroupImportanceMode mode = GroupImportanceMode::kAbsOfGroupSum);

// Transformation group x wavelength-bin heatmap. Cells hold mean |phi| over
// the (features of the group whose band falls in the bin) x (samples).
struct BandGroupMatrix {
  std::vector<TransformationGroup> rows;
  std::vector<double> bin_edges;  // n_bins + 1 edges in nm
  std::vector<std::string> col_labels;
  std::vector<std::vector<double>> cells;
  std::vector<std::vector<bool>> empty;  // true where no feature fell in the cell
  // Groups with nonspectral provenance, one mean |phi| each.
  std::vector<std::pair<TransformationGroup, double>> nonspectral;
  std::string statistic = "mean_abs_shap";
};

// Bin of `wavelength_nm` among n_bins equal-width bins over the axis range;
// the upper endpoint belongs to the last bin.
int WavelengthBin(const BandAxis& axis, int n_bins, double wavelength_nm);

BandGroupMatrix BandTransformationMatrix(const ShapMatrix& sm, const FeatureSchema& schema,
                                         int n_bins);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_AGGREGATION_H_
