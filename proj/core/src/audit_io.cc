#include "hyperaudit/audit_io.h"

#include <cmath>

#include "io_util.h"
#include "json.hpp"

namespace hyperaudit {
using nlohmann::json;
namespace {

json Num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json CasesJson(const std::vector<ExtremeCase>& cases, const FeatureSchema& schema) {
  json out = json::array();
  for (const ExtremeCase& c : cases) {
    json top = json::array();
    for (const FeatureContribution& f : c.top_features) {
      top.push_back({{"feature_id", f.feature_id},
                     {"label", schema.Label(f.feature_id)},
                     {"shap_value", f.shap_value}});
    }
    out.push_back({{"sample_id", c.sample_id}, {"residual", c.residual}, {"top_features", top}});
  }
  return out;
}

}  // namespace

std::string AuditReportJson(const std::vector<AuditTargetReport>& targets,
                            const RedFlagThresholds& thresholds, const FeatureSchema& schema) {
  json j;
  j["version"] = "v1";
  j["thresholds"] = {{"sd_ratio", thresholds.sd_ratio},
                     {"coverage", thresholds.coverage},
                     {"mass", thresholds.mass},
                     {"feature_fraction", thresholds.feature_fraction}};
  json per_target = json::array();
  for (const AuditTargetReport& t : targets) {
    const ResidualSummary& rs = t.residuals;
    json flags = json::array();
    for (const RedFlag f : t.red_flags.flags) flags.push_back(RedFlagName(f));
    json evidence = json::object();
    for (const auto& [k, v] : t.red_flags.evidence) evidence[k] = Num(v);
    per_target.push_back({
        {"target", t.target},
        {"n_samples", rs.residuals.size()},
        {"mae", Num(t.mae)},
        {"residuals",
         {{"mean", Num(rs.mean)},
          {"sd", Num(rs.sd)},
          {"q25", Num(rs.q25)},
          {"q50", Num(rs.q50)},
          {"q75", Num(rs.q75)},
          {"pred_sd", Num(rs.pred_sd)},
          {"truth_sd", Num(rs.truth_sd)},
          {"sd_ratio", Num(rs.sd_ratio)},
          {"truth_q10", Num(rs.truth_q10)},
          {"truth_q90", Num(rs.truth_q90)},
          {"central_coverage", Num(rs.central_coverage)}}},
        {"red_flags", {{"flags", flags}, {"evidence", evidence}, {"notes", t.red_flags.notes}}},
        {"extremes",
         {{"overestimated", CasesJson(t.extremes.overestimated, schema)},
          {"underestimated", CasesJson(t.extremes.underestimated, schema)},
          {"best", CasesJson(t.extremes.best, schema)}}},
    });
  }
  j["targets"] = std::move(per_target);
  return j.dump(2) + "\n";
}

void WriteAuditReport(const std::vector<AuditTargetReport>& targets,
                      const RedFlagThresholds& thresholds, const FeatureSchema& schema,
                      const std::filesystem::path& path) {
  WriteFileBytes(path, AuditReportJson(targets, thresholds, schema));
}

void WriteResidualsCsv(const ResidualSummary& rs, const std::filesystem::path& path) {
  std::string out = "section,index,a,b,c\n";
  for (std::size_t i = 0; i < rs.residuals.size(); ++i) {
    out += JoinCsvLine({"scatter", std::to_string(i), FormatDouble(rs.truth[i]),
                        FormatDouble(rs.pred[i]), FormatDouble(rs.residuals[i])});
  }
  for (int b = 0; b < kResidualHistogramBins; ++b) {
    out += JoinCsvLine({"histogram", std::to_string(b), FormatDouble(rs.hist_edges[b]),
                        FormatDouble(rs.hist_edges[b + 1]), std::to_string(rs.hist_counts[b])});
  }
  const std::pair<double, double> quantiles[] = {{0.25, rs.q25}, {0.50, rs.q50}, {0.75, rs.q75}};
  int qi = 0;
  for (const auto& [p, v] : quantiles) {
    out += JoinCsvLine({"quantile", std::to_string(qi++), FormatDouble(p), FormatDouble(v), ""});
  }
  const std::pair<const char*, double> summary[] = {
      {"residual_mean", rs.mean},     {"residual_sd", rs.sd},
      {"pred_sd", rs.pred_sd},        {"truth_sd", rs.truth_sd},
      {"sd_ratio", rs.sd_ratio},      {"truth_q10", rs.truth_q10},
      {"truth_q90", rs.truth_q90},    {"central_coverage", rs.central_coverage}};
  int si = 0;
  for (const auto& [name, v] : summary) {
    out += JoinCsvLine({"summary", std::to_string(si++), name, FormatDouble(v), ""});
  }
  WriteFileBytes(path, out);
}

}  // namespace hyperaudit
