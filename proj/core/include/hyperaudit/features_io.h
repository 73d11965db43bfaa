#ifndef HYPERAUDIT_FEATURES_IO_H_
#define HYPERAUDIT_FEATURES_IO_H_

#include <filesystem>

#include "hyperaudit/features.h"

namespace hyperaudit {

// schema.json: version, axis, spatial flag, column labels and fingerprint.
void SaveSchema(const FeatureSchema& schema, const std::filesystem::path& path);
FeatureSchema LoadSchema(const std::filesystem::path& path);

// CSV with a leading `sample_id` column followed by one column per feature
// labelled "g:<group>|b:<band|NA>". Values use shortest round-trip decimals.
void SaveFeatureTable(const FeatureTable& table, const std::filesystem::path& path);

// The header must match `schema` label for label; mismatches throw
// ValidationError.
FeatureTable LoadFeatureTable(const std::filesystem::path& path, const FeatureSchema& schema);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_FEATURES_IO_H_
