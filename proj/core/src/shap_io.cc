#include "hyperaudit/shap_io.h"

#include <string>

#include "hyperaudit/errors.h"
#include "io_util.h"
#include "json.hpp"

namespace hyperaudit {
using nlohmann::json;

void SaveShapMatrix(const ShapMatrix& sm, const FeatureSchema& schema,
                    const std::filesystem::path& csv_path,
                    const std::filesystem::path& sidecar_path) {
  if (schema.size() != sm.n_features || schema.Fingerprint() != sm.schema_fingerprint) {
    throw ValidationError("shap matrix does not belong to the given schema");
  }
  std::vector<std::string> header{"sample_id"};
  for (std::size_t f = 0; f < schema.size(); ++f) header.push_back(schema.Label(f));
  std::string out = JoinCsvLine(header);
  for (std::size_t r = 0; r < sm.n_samples; ++r) {
    out += std::to_string(sm.sample_ids[r]);
    for (const double v : sm.Row(r)) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  WriteFileBytes(csv_path, out);

  json j;
  j["version"] = "v1";
  j["base_value"] = sm.base_value;
  j["schema_fingerprint"] = sm.schema_fingerprint;
  j["n_samples"] = sm.n_samples;
  j["n_features"] = sm.n_features;
  WriteFileBytes(sidecar_path, j.dump(2) + "\n");
}

ShapMatrix LoadShapMatrix(const FeatureSchema& schema, const std::filesystem::path& csv_path,
                          const std::filesystem::path& sidecar_path) {
  ShapMatrix sm;
  try {
    const json j = json::parse(ReadFileBytes(sidecar_path));
    if (j.at("version").get<std::string>() != "v1") throw ValidationError("unsupported version");
    sm.base_value = j.at("base_value").get<double>();
    sm.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
    sm.n_samples = j.at("n_samples").get<std::size_t>();
    sm.n_features = j.at("n_features").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ValidationError(sidecar_path.string() + ": " + e.what());
  }
  if (sm.schema_fingerprint != schema.Fingerprint() || sm.n_features != schema.size()) {
    throw ValidationError(sidecar_path.string() + ": schema fingerprint mismatch");
  }
  const CsvTable csv = ReadCsv(csv_path);
  if (csv.header.size() != schema.size() + 1) {
    throw ValidationError(csv_path.string() + ": column count does not match schema");
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (csv.header[f + 1] != schema.Label(f)) {
      throw ValidationError(csv_path.string() + ": header does not match schema at column " +
                            std::to_string(f));
    }
  }
  if (csv.rows.size() != sm.n_samples) {
    throw ValidationError(csv_path.string() + ": row count does not match sidecar");
  }
  sm.values.reserve(sm.n_samples * sm.n_features);
  for (const auto& row : csv.rows) {
    sm.sample_ids.push_back(static_cast<int>(ParseInt(row[0])));
    for (std::size_t f = 1; f < row.size(); ++f) sm.values.push_back(ParseDouble(row[f]));
  }
  return sm;
}

}  // namespace hyperaudit
