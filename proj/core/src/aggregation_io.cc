#include "hyperaudit/aggregation_io.h"

#include <string>

#include "io_util.h"
#include "json.hpp"

namespace hyperaudit {
using nlohmann::json;

void WriteImportanceCsv(std::span<const double> importance, const FeatureSchema& schema,
                        const std::filesystem::path& path) {
  std::string out = "rank,feature_id,label,group,band,wavelength_nm,importance\n";
  const std::vector<int> order = RankByImportance(importance);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const FeatureEntry& e = schema.entries.at(order[rank]);
    out += JoinCsvLine({std::to_string(rank + 1), std::to_string(e.id), schema.Label(e.id),
                        std::string(GroupName(e.group)),
                        e.band ? std::to_string(*e.band) : "NA",
                        e.band ? FormatDouble(schema.axis.WavelengthOf(*e.band)) : "NA",
                        FormatDouble(importance[e.id])});
  }
  WriteFileBytes(path, out);
}

void WriteGroupsCsv(const std::vector<GroupImportance>& attribution,
                    const std::vector<GroupImportance>& sum_abs,
                    const std::filesystem::path& path) {
  std::string out = "group,n_features,attribution,sum_abs\n";
  for (std::size_t i = 0; i < attribution.size(); ++i) {
    out += JoinCsvLine({std::string(GroupName(attribution[i].group)),
                        std::to_string(attribution[i].n_features),
                        FormatDouble(attribution[i].importance),
                        FormatDouble(sum_abs.at(i).importance)});
  }
  WriteFileBytes(path, out);
}

void WriteHeatmap(const BandGroupMatrix& m, const std::filesystem::path& csv_path,
                  const std::filesystem::path& sidecar_path) {
  std::vector<std::string> header{"group"};
  header.insert(header.end(), m.col_labels.begin(), m.col_labels.end());
  std::string out = JoinCsvLine(header);
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    std::vector<std::string> fields{std::string(GroupName(m.rows[r]))};
    for (const double v : m.cells[r]) fields.push_back(FormatDouble(v));
    out += JoinCsvLine(fields);
  }
  WriteFileBytes(csv_path, out);

  json j;
  j["version"] = "v1";
  j["statistic"] = m.statistic;
  j["bin_edges_nm"] = m.bin_edges;
  j["col_labels"] = m.col_labels;
  json rows = json::array();
  for (const auto g : m.rows) rows.push_back(GroupName(g));
  j["rows"] = std::move(rows);
  json mask = json::array();
  for (const auto& row : m.empty) {
    json jr = json::array();
    for (const bool e : row) jr.push_back(e);
    mask.push_back(std::move(jr));
  }
  j["empty_mask"] = std::move(mask);
  json ns = json::array();
  for (const auto& [g, v] : m.nonspectral) {
    ns.push_back({{"group", GroupName(g)}, {"column", "nonspectral"}, {"value", v}});
  }
  j["nonspectral"] = std::move(ns);
  WriteFileBytes(sidecar_path, j.dump(2) + "\n");
}

void WriteDependencyCsv(const std::vector<DependencyPoint>& points, std::span<const int> sample_ids,
                        const std::filesystem::path& path) {
  std::string out = "sample_id,feature_value,shap_value\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out += JoinCsvLine({std::to_string(sample_ids[i]), FormatDouble(points[i].feature_value),
                        FormatDouble(points[i].shap_value)});
  }
  WriteFileBytes(path, out);
}

void WriteBeeswarmCsv(const std::vector<BeeswarmFeature>& blocks, const FeatureSchema& schema,
                      const std::filesystem::path& path) {
  std::string out = "order,feature_id,label,importance,sample_id,percentile,shap_value\n";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    for (const auto& p : b.points) {
      out += JoinCsvLine({std::to_string(i), std::to_string(b.feature_id),
                          schema.Label(b.feature_id), FormatDouble(b.importance),
                          std::to_string(p.sample_id), FormatDouble(p.percentile),
                          FormatDouble(p.shap_value)});
    }
  }
  WriteFileBytes(path, out);
}

}  // namespace hyperaudit
