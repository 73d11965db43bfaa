#ifndef HYPERAUDIT_TOOLS_COMMANDS_H_
#define HYPERAUDIT_TOOLS_COMMANDS_H_

#include <filesystem>
#include <string>

#include "config.h"
#include "hyperaudit/dataset.h"

namespace hyperaudit::cli {

// Artifact locations inside a workdir. Every stage reads its inputs from
// here and writes only its own outputs.
struct Layout {
  explicit Layout(std::filesystem::path workdir);

  std::filesystem::path root;
  std::filesystem::path data;
  std::filesystem::path features;
  std::filesystem::path schema;
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
  std::filesystem::path models;
  std::filesystem::path shap;
  std::filesystem::path aggregate;
  std::filesystem::path prune_report;
  std::filesystem::path audit;
  std::filesystem::path audit_report;
  std::filesystem::path report_json;
  std::filesystem::path report_md;

  std::filesystem::path Forest(Target t) const;
  std::filesystem::path ShapCsv(Target t) const;
  std::filesystem::path ShapSidecar(Target t) const;
  std::filesystem::path AggregateDir(Target t) const;
  std::filesystem::path Residuals(Target t) const;
};

void GenData(const RunConfig& cfg);
void Extract(const RunConfig& cfg);
void Train(const RunConfig& cfg);
void Explain(const RunConfig& cfg);
void Aggregate(const RunConfig& cfg);
void Prune(const RunConfig& cfg);
void Audit(const RunConfig& cfg);
void Report(const RunConfig& cfg);

// gen-data through report, in order.
void RunAll(const RunConfig& cfg);

// Renders report.json's content as the Markdown summary. Exposed for tests.
std::string ReportMarkdown(const nlohmann::json& report);

}  // namespace hyperaudit::cli

#endif  // HYPERAUDIT_TOOLS_COMMANDS_H_
