#ifndef HYPERAUDIT_FOREST_IO_H_
#define HYPERAUDIT_FOREST_IO_H_

#include <filesystem>
#include <string>

#include "hyperaudit/forest.h"

namespace hyperaudit {

// Versioned ("v1") JSON. Doubles are written in shortest round-trip form so
// a reloaded forest predicts bit-identically.
std::string ForestToJson(const Forest& forest);
// Throws ValidationError if the text is not a valid v1 forest. The cover
// invariant is checked along with the tree structure.
Forest ForestFromJson(const std::string& text);

void SaveForest(const Forest& forest, const std::filesystem::path& path);
Forest LoadForest(const std::filesystem::path& path);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_FOREST_IO_H_
