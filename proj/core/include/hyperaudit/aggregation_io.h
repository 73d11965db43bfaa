#ifndef HYPERAUDIT_AGGREGATION_IO_H_
#define HYPERAUDIT_AGGREGATION_IO_H_

#include <filesystem>
#include <span>
#include <vector>

#include "hyperaudit/aggregation.h"
#include "hyperaudit/plot_data.h"

namespace hyperaudit {

// importance.csv: rank, feature_id, label, group, band, wavelength_nm, importance.
void WriteImportanceCsv(std::span<const double> importance, const FeatureSchema& schema,
                        const std::filesystem::path& path);

// groups.csv: group, n_features, attribution (|group sum|), sum_abs.
void WriteGroupsCsv(const std::vector<GroupImportance>& attribution,
                    const std::vector<GroupImportance>& sum_abs,
                    const std::filesystem::path& path);

// heatmap.csv: one row per transformation group, one column per wavelength
// bin, plus a JSON sidecar with bin edges, the empty-cell mask, the
// nonspectral block and the statistic name.
void WriteHeatmap(const BandGroupMatrix& m, const std::filesystem::path& csv_path,
                  const std::filesystem::path& sidecar_path);

// dependency.csv: sample_id, feature_value, shap_value.
void WriteDependencyCsv(const std::vector<DependencyPoint>& points, std::span<const int> sample_ids,
                        const std::filesystem::path& path);

// beeswarm.csv: order, feature_id, label, importance, sample_id, percentile, shap_value.
void WriteBeeswarmCsv(const std::vector<BeeswarmFeature>& blocks, const FeatureSchema& schema,
                      const std::filesystem::path& path);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_AGGREGATION_IO_H_
