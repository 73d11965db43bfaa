#ifndef HYPERAUDIT_DATASET_IO_H_
#define HYPERAUDIT_DATASET_IO_H_

#include <filesystem>

#include "hyperaudit/dataset.h"

namespace hyperaudit {

// Writes `manifest.json`, `patch_<i>.f32` (float32 little-endian,
// [row][col][band]) and `mask_<i>.bits` (row-major, LSB-first packed bits)
// into `dir`, creating it if needed.
void SaveDataset(const Dataset& ds, const std::filesystem::path& dir);

// Reads a dataset directory written by SaveDataset. Every invariant of the
// dataset types is checked; failures throw ValidationError naming the
// offending patch.
Dataset LoadDataset(const std::filesystem::path& dir);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_DATASET_IO_H_
