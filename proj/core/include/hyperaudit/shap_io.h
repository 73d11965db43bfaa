#ifndef HYPERAUDIT_SHAP_IO_H_
#define HYPERAUDIT_SHAP_IO_H_

#include <filesystem>

#include "hyperaudit/features.h"
#include "hyperaudit/shap.h"

namespace hyperaudit {

// `csv_path`: sample_id column plus one column per schema label.
// `sidecar_path`: JSON with version, base_value, schema_fingerprint and shape.
void SaveShapMatrix(const ShapMatrix& sm, const FeatureSchema& schema,
                    const std::filesystem::path& csv_path,
                    const std::filesystem::path& sidecar_path);

// Validates the header against `schema` and the sidecar fingerprint.
ShapMatrix LoadShapMatrix(const FeatureSchema& schema, const std::filesystem::path& csv_path,
                          const std::filesystem::path& sidecar_path);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_SHAP_IO_H_
