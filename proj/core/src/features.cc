#include "hyperaudit/features.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperaudit/hash.h"
#include "hyperaudit/parallel.h"

namespace hyperaudit {
namespace {

constexpr std::array<std::string_view, kNumTransformationGroups> kGroupNames = {
    "mean_spectrum", "std_spectrum", "grad1", "grad2", "spatial_var", "spatial_edge", "meta"};

// Extracts into `out` (sized by the schema) without building a schema.
void ExtractInto(const HyperPatch& patch, bool spatial, std::span<double> out) {
  const int b = patch.axis.n_bands;
  const double count = static_cast<double>(patch.MaskedCount());

  std::vector<double> mean(b, 0.0);
  for (int r = 0; r < patch.height; ++r) {
    for (int c = 0; c < patch.width; ++c) {
      if (!patch.Masked(r, c)) continue;
      for (int k = 0; k < b; ++k) mean[k] += patch.At(r, c, k);
    }
  }
  for (double& m : mean) m /= count;

  std::vector<double> var(b, 0.0);
  for (int r = 0; r < patch.height; ++r) {
    for (int c = 0; c < patch.width; ++c) {
      if (!patch.Masked(r, c)) continue;
      for (int k = 0; k < b; ++k) {
        const double d = patch.At(r, c, k) - mean[k];
        var[k] += d * d;
      }
    }
  }
  for (double& v : var) v /= count;

  std::size_t o = 0;
  for (int k = 0; k < b; ++k) out[o++] = mean[k];
  for (int k = 0; k < b; ++k) out[o++] = std::sqrt(var[k]);
  for (int k = 0; k + 1 < b; ++k) out[o++] = mean[k + 1] - mean[k];
  for (int k = 0; k + 2 < b; ++k) out[o++] = mean[k + 2] - 2.0 * mean[k + 1] + mean[k];
  if (!spatial) return;

  for (int k = 0; k < b; ++k) out[o++] = var[k];

  std::vector<double> edge(b, 0.0);
  std::size_t pairs = 0;
  for (int r = 0; r < patch.height; ++r) {
    for (int c = 0; c + 1 < patch.width; ++c) {
      if (!patch.Masked(r, c) || !patch.Masked(r, c + 1)) continue;
      ++pairs;
      for (int k = 0; k < b; ++k) {
        edge[k] += std::abs(static_cast<double>(patch.At(r, c + 1, k)) - patch.At(r, c, k));
      }
    }
  }
  for (int k = 0; k < b; ++k) out[o++] = pairs == 0 ? 0.0 : edge[k] / static_cast<double>(pairs);

  out[o++] = std::log(count);
  out[o++] = static_cast<double>(patch.width) / patch.height;
}

}  // namespace

std::string_view GroupName(TransformationGroup g) {
  return kGroupNames[static_cast<std::size_t>(g)];
}

TransformationGroup ParseGroup(std::string_view name) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == name) return static_cast<TransformationGroup>(i);
  }
  throw std::invalid_argument("unknown transformation group '" + std::string(name) + "'");
}

bool IsSpatialGroup(TransformationGroup g) {
  return g == TransformationGroup::kSpatialVar || g == TransformationGroup::kSpatialEdge ||
         g == TransformationGroup::kMeta;
}

std::string FeatureSchema::Label(std::size_t feature_id) const {
  const FeatureEntry& e = entries.at(feature_id);
  std::string label = "g:";
  label += GroupName(e.group);
  label += "|b:";
  label += e.band ? std::to_string(*e.band) : "NA";
  return label;
}

std::string FeatureSchema::Fingerprint() const {
  std::string canon = "schema-v1;" + std::to_string(axis.n_bands) + ';';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g;%.17g;", axis.lambda_min_nm, axis.lambda_max_nm);
  canon += buf;
  canon += spatial_enabled ? "spatial;" : "spectral;";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    canon += Label(i);
    canon += ';';
  }
  return HexDigest(Fnv1a64(canon));
}

void FeatureSchema::Validate() const {
  axis.Validate();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].id != static_cast<int>(i)) {
      throw std::invalid_argument("feature ids must be contiguous from 0");
    }
    if (entries[i].band && (*entries[i].band < 0 || *entries[i].band >= axis.n_bands)) {
      throw std::invalid_argument("feature band provenance out of range");
    }
  }
}

FeatureSchema BuildSchema(const BandAxis& axis, bool spatial) {
  axis.Validate();
  FeatureSchema schema;
  schema.axis = axis;
  schema.spatial_enabled = spatial;
  const int b = axis.n_bands;
  auto add = [&](TransformationGroup g, std::optional<int> band) {
    schema.entries.push_back({static_cast<int>(schema.entries.size()), g, band});
  };
  for (int k = 0; k < b; ++k) add(TransformationGroup::kMeanSpectrum, k);
  for (int k = 0; k < b; ++k) add(TransformationGroup::kStdSpectrum, k);
  for (int k = 0; k + 1 < b; ++k) add(TransformationGroup::kGrad1, k);
  for (int k = 0; k + 2 < b; ++k) add(TransformationGroup::kGrad2, k);
  if (spatial) {
    for (int k = 0; k < b; ++k) add(TransformationGroup::kSpatialVar, k);
    for (int k = 0; k < b; ++k) add(TransformationGroup::kSpatialEdge, k);
    add(TransformationGroup::kMeta, std::nullopt);
    add(TransformationGroup::kMeta, std::nullopt);
  }
  return schema;
}

std::vector<double> FeatureTable::Column(std::size_t f) const {
  std::vector<double> col(n_samples);
  for (std::size_t r = 0; r < n_samples; ++r) col[r] = At(r, f);
  return col;
}

FeatureTable FeatureTable::SelectRows(std::span<const std::size_t> rows) const {
  FeatureTable out;
  out.schema = schema;
  out.n_samples = rows.size();
  out.matrix.reserve(rows.size() * n_features());
  for (const std::size_t r : rows) {
    const auto row = Row(r);
    out.matrix.insert(out.matrix.end(), row.begin(), row.end());
    out.sample_ids.push_back(sample_ids.at(r));
  }
  return out;
}

void FeatureTable::Validate() const {
  schema.Validate();
  if (matrix.size() != n_samples * n_features()) {
    throw std::invalid_argument("feature matrix size does not match schema");
  }
  if (sample_ids.size() != n_samples) throw std::invalid_argument("sample ids not aligned with rows");
  for (const double v : matrix) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
  }
}

PatchFeatures ExtractPatch(const HyperPatch& patch, bool spatial) {
  patch.Validate();
  PatchFeatures pf;
  pf.schema = BuildSchema(patch.axis, spatial);
  pf.values.resize(pf.schema.size());
  ExtractInto(patch, spatial, pf.values);
  return pf;
}

FeatureTable ExtractDataset(const Dataset& ds, bool spatial) {
  for (const HyperPatch& p : ds.patches) {
    if (p.axis != ds.axis) throw std::invalid_argument("patches do not share one band axis");
  }
  FeatureTable table;
  table.schema = BuildSchema(ds.axis, spatial);
  table.n_samples = ds.size();
  table.matrix.assign(table.n_samples * table.n_features(), 0.0);
  table.sample_ids.resize(ds.size());
  ParallelFor(ds.size(), [&](std::size_t i) {
    ds.patches[i].Validate();
    ExtractInto(ds.patches[i], spatial, table.Row(i));
    table.sample_ids[i] = static_cast<int>(i);
  });
  return table;
}

}  // namespace hyperaudit
