#ifndef HYPERAUDIT_FEATURES_H_
#define HYPERAUDIT_FEATURES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperaudit/dataset.h"

namespace hyperaudit {

// Transformation families, in extraction order.
enum class TransformationGroup {
  kMeanSpectrum,
  kStdSpectrum,
  kGrad1,
  kGrad2,
  kSpatialVar,
  kSpatialEdge,
  kMeta,
};

inline constexpr std::size_t kNumTransformationGroups = 7;

std::string_view GroupName(TransformationGroup g);
TransformationGroup ParseGroup(std::string_view name);
// True for spatial_var, spatial_edge and meta.
bool IsSpatialGroup(TransformationGroup g);

struct FeatureEntry {
  int id = 0;
  TransformationGroup group = TransformationGroup::kMeanSpectrum;
  // Band index the feature is attributed to; nullopt for nonspectral
  // features. Difference features use the lower band of the pair.
  std::optional<int> band;

  bool operator==(const FeatureEntry&) const = default;
};

struct FeatureSchema {
  std::vector<FeatureEntry> entries;
  BandAxis axis;
  bool spatial_enabled = false;

  std::size_t size() const { return entries.size(); }

  // Column header label: "g:<group>|b:<band|NA>".
  std::string Label(std::size_t feature_id) const;

  // Stable hash over axis, spatial flag and (group, band) of every entry.
  std::string Fingerprint() const;

  // Throws std::invalid_argument on non-contiguous ids or bad bands.
  void Validate() const;

  bool operator==(const FeatureSchema&) const = default;
};

// Schema produced by ExtractPatch for the given axis and mode:
// 4b-3 features in spectral mode, 6b-1 with spatial groups.
FeatureSchema BuildSchema(const BandAxis& axis, bool spatial);

// Dense row-major sample x feature matrix.
struct FeatureTable {
  FeatureSchema schema;
  std::size_t n_samples = 0;
  std::vector<double> matrix;
  std::vector<int> sample_ids;

  std::size_t n_features() const { return schema.size(); }
  std::span<const double> Row(std::size_t r) const {
    return {matrix.data() + r * n_features(), n_features()};
  }
  std::span<double> Row(std::size_t r) {
    return {matrix.data() + r * n_features(), n_features()};
  }
  double At(std::size_t r, std::size_t f) const { return matrix[r * n_features() + f]; }
  std::vector<double> Column(std::size_t f) const;

  // Rows at the given positions, in the given order.
  FeatureTable SelectRows(std::span<const std::size_t> rows) const;

  void Validate() const;
};

struct PatchFeatures {
  std::vector<double> values;
  FeatureSchema schema;
};

PatchFeatures ExtractPatch(const HyperPatch& patch, bool spatial);

// One row per sample in dataset order; sample_ids are dataset indices.
// Throws std::invalid_argument when patches carry different axes.
FeatureTable ExtractDataset(const Dataset& ds, bool spatial);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_FEATURES_H_
