#ifndef HYPERAUDIT_AUDIT_IO_H_
#define HYPERAUDIT_AUDIT_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "hyperaudit/audit.h"
#include "hyperaudit/features.h"

namespace hyperaudit {

struct AuditTargetReport {
  std::string target;
  double mae = 0.0;
  ResidualSummary residuals;
  RedFlagReport red_flags;
  ExtremeCases extremes;
};

// audit_report.json. Feature ids in the extreme cases are annotated with
// their schema labels. Non-finite numbers are written as null.
std::string AuditReportJson(const std::vector<AuditTargetReport>& targets,
                            const RedFlagThresholds& thresholds, const FeatureSchema& schema);
void WriteAuditReport(const std::vector<AuditTargetReport>& targets,
                      const RedFlagThresholds& thresholds, const FeatureSchema& schema,
                      const std::filesystem::path& path);

// residuals_<target>.csv in long form with columns section,index,a,b,c:
//   scatter:   index = sample position, a = truth, b = pred, c = residual
//   histogram: index = bin, a = lower edge, b = upper edge, c = count
//   quantile:  residual quartiles; a = probability, b = value, c = empty
//   summary:   index = 0.., a = statistic name, b = value, c = empty
void WriteResidualsCsv(const ResidualSummary& rs, const std::filesystem::path& path);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_AUDIT_IO_H_
