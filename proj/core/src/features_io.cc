#include "hyperaudit/features_io.h"

#include <cmath>
#include <string>

#include "hyperaudit/errors.h"
#include "io_util.h"
#include "json.hpp"

namespace hyperaudit {
using nlohmann::json;

namespace {

FeatureEntry ParseLabel(const std::string& label, int id) {
  const std::size_t bar = label.find("|b:");
  if (label.rfind("g:", 0) != 0 || bar == std::string::npos) {
    throw ValidationError("malformed feature label '" + label + "'");
  }
  FeatureEntry e;
  e.id = id;
  try {
    e.group = ParseGroup(label.substr(2, bar - 2));
  } catch (const std::invalid_argument& ex) {
    throw ValidationError(ex.what());
  }
  const std::string band = label.substr(bar + 3);
  if (band != "NA") e.band = static_cast<int>(ParseInt(band));
  return e;
}

}  // namespace

void SaveSchema(const FeatureSchema& schema, const std::filesystem::path& path) {
  json j;
  j["version"] = "v1";
  j["axis"] = {{"n_bands", schema.axis.n_bands},
               {"lambda_min_nm", schema.axis.lambda_min_nm},
               {"lambda_max_nm", schema.axis.lambda_max_nm}};
  j["spatial"] = schema.spatial_enabled;
  j["n_features"] = schema.size();
  json labels = json::array();
  for (std::size_t i = 0; i < schema.size(); ++i) labels.push_back(schema.Label(i));
  j["labels"] = std::move(labels);
  j["fingerprint"] = schema.Fingerprint();
  WriteFileBytes(path, j.dump(2) + "\n");
}

FeatureSchema LoadSchema(const std::filesystem::path& path) {
  FeatureSchema schema;
  std::string fingerprint;
  try {
    const json j = json::parse(ReadFileBytes(path));
    if (j.at("version").get<std::string>() != "v1") throw ValidationError("unsupported schema version");
    schema.axis.n_bands = j.at("axis").at("n_bands").get<int>();
    schema.axis.lambda_min_nm = j.at("axis").at("lambda_min_nm").get<double>();
    schema.axis.lambda_max_nm = j.at("axis").at("lambda_max_nm").get<double>();
    schema.spatial_enabled = j.at("spatial").get<bool>();
    const auto& labels = j.at("labels");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      schema.entries.push_back(ParseLabel(labels[i].get<std::string>(), static_cast<int>(i)));
    }
    if (j.at("n_features").get<std::size_t>() != schema.size()) {
      throw ValidationError("n_features does not match label count");
    }
    fingerprint = j.at("fingerprint").get<std::string>();
    schema.Validate();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (schema.Fingerprint() != fingerprint) {
    throw ValidationError(path.string() + ": schema fingerprint does not match its labels");
  }
  return schema;
}

void SaveFeatureTable(const FeatureTable& table, const std::filesystem::path& path) {
  table.Validate();
  std::string out;
  std::vector<std::string> fields;
  fields.push_back("sample_id");
  for (std::size_t f = 0; f < table.n_features(); ++f) fields.push_back(table.schema.Label(f));
  out += JoinCsvLine(fields);
  for (std::size_t r = 0; r < table.n_samples; ++r) {
    out += std::to_string(table.sample_ids[r]);
    for (const double v : table.Row(r)) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  WriteFileBytes(path, out);
}

FeatureTable LoadFeatureTable(const std::filesystem::path& path, const FeatureSchema& schema) {
  const CsvTable csv = ReadCsv(path);
  if (csv.header.size() != schema.size() + 1 || csv.header[0] != "sample_id") {
    throw ValidationError(path.string() + ": column count does not match schema (" +
                          std::to_string(csv.header.size() - 1) + " vs " +
                          std::to_string(schema.size()) + ")");
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (csv.header[f + 1] != schema.Label(f)) {
      throw ValidationError(path.string() + ": column " + std::to_string(f) + " is '" +
                            csv.header[f + 1] + "', schema expects '" + schema.Label(f) + "'");
    }
  }
  FeatureTable table;
  table.schema = schema;
  table.n_samples = csv.rows.size();
  table.matrix.reserve(table.n_samples * schema.size());
  for (const auto& row : csv.rows) {
    table.sample_ids.push_back(static_cast<int>(ParseInt(row[0])));
    for (std::size_t f = 1; f < row.size(); ++f) {
      const double v = ParseDouble(row[f]);
      if (!std::isfinite(v)) throw ValidationError(path.string() + ": non-finite feature value");
      table.matrix.push_back(v);
    }
  }
  return table;
}

}  // namespace hyperaudit
