#ifndef HYPERAUDIT_PRUNING_IO_H_
#define HYPERAUDIT_PRUNING_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "hyperaudit/pruning.h"

namespace hyperaudit {

struct PruneTargetReport {
  std::string target;
  MinimalKResult result;
};

// prune_report.json: one row per target shaped like a comparison table row
// (full feature count, full MAE, k, pruned MAE, percent delta), followed by
// every evaluated ladder point. A target with no passing k gets null k.
std::string PruneReportJson(const std::vector<PruneTargetReport>& targets, double tol);
void WritePruneReport(const std::vector<PruneTargetReport>& targets, double tol,
                      const std::filesystem::path& path);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_PRUNING_IO_H_
