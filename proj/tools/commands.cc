#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "hyperaudit/aggregation.h"
#include "hyperaudit/aggregation_io.h"
#include "hyperaudit/audit.h"
#include "hyperaudit/audit_io.h"
#include "hyperaudit/dataset_io.h"
#include "hyperaudit/errors.h"
#include "hyperaudit/features.h"
#include "hyperaudit/features_io.h"
#include "hyperaudit/forest_io.h"
#include "hyperaudit/hash.h"
#include "hyperaudit/plot_data.h"
#include "hyperaudit/pruning.h"
#include "hyperaudit/pruning_io.h"
#include "hyperaudit/shap.h"
#include "hyperaudit/shap_io.h"
#include "hyperaudit/synthetic.h"

namespace hyperaudit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kReportTopFeatures = 5;

void Log(std::string_view stage, const std::string& message) {
  std::cerr << "hyperaudit " << stage << ": " << message << "\n";
}

std::string Name(Target t) { return std::string(TargetName(t)); }

// Missing inputs are a validation problem: the message names the file and
// the stage that produces it.
void Require(const fs::path& path, std::string_view producer) {
  if (!fs::exists(path)) {
    throw ValidationError(path.string() + ": missing input artifact (run `hyperaudit " +
                          std::string(producer) + "` first)");
  }
}

json ReadJson(const fs::path& path, std::string_view producer) {
  Require(path, producer);
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Dataset LoadWorkdirDataset(const Layout& layout) {
  Require(layout.data / "manifest.json", "gen-data");
  return LoadDataset(layout.data);
}

FeatureSchema LoadWorkdirSchema(const Layout& layout) {
  Require(layout.schema, "extract");
  return LoadSchema(layout.schema);
}

FeatureTable LoadSplit(const Layout& layout, const FeatureSchema& schema, Split split) {
  const fs::path& path = split == Split::kTrain ? layout.train_csv : layout.test_csv;
  Require(path, "extract");
  return LoadFeatureTable(path, schema);
}

// Target values for the rows of `table`, checking that every row refers to
// a sample of the expected split.
std::vector<double> TargetsFor(const Dataset& ds, const FeatureTable& table, Target t,
                               Split split, const fs::path& source) {
  std::vector<double> y;
  y.reserve(table.n_samples);
  for (const int id : table.sample_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= ds.size() || ds.split[id] != split) {
      throw ValidationError(source.string() + ": sample_id " + std::to_string(id) +
                            " is not a " + (split == Split::kTrain ? "train" : "test") +
                            " sample of the workdir dataset");
    }
    y.push_back(ds.targets[id].Get(t));
  }
  return y;
}

Forest LoadCheckedForest(const Layout& layout, const FeatureSchema& schema, Target t) {
  const fs::path path = layout.Forest(t);
  Require(path, "train");
  Forest forest = LoadForest(path);
  if (forest.schema_fingerprint != schema.Fingerprint()) {
    throw ValidationError(path.string() + ": schema fingerprint " + forest.schema_fingerprint +
                          " does not match " + layout.schema.string() + " (" +
                          schema.Fingerprint() + "); re-run `hyperaudit train`");
  }
  if (forest.target_name != Name(t)) {
    throw ValidationError(path.string() + ": forest was trained for target '" +
                          forest.target_name + "', expected '" + Name(t) + "'");
  }
  return forest;
}

ShapMatrix LoadCheckedShap(const Layout& layout, const FeatureSchema& schema,
                           const FeatureTable& test, Target t) {
  Require(layout.ShapCsv(t), "explain");
  Require(layout.ShapSidecar(t), "explain");
  ShapMatrix sm = LoadShapMatrix(schema, layout.ShapCsv(t), layout.ShapSidecar(t));
  if (sm.sample_ids != test.sample_ids) {
    throw ValidationError(layout.ShapCsv(t).string() + ": sample ids do not match " +
                          layout.test_csv.string());
  }
  return sm;
}

FeatureTable Stack(const FeatureTable& a, const FeatureTable& b) {
  FeatureTable out = a;
  out.n_samples = a.n_samples + b.n_samples;
  out.matrix.insert(out.matrix.end(), b.matrix.begin(), b.matrix.end());
  out.sample_ids.insert(out.sample_ids.end(), b.sample_ids.begin(), b.sample_ids.end());
  return out;
}

std::string FormatMae(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  if (std::abs(v) >= 100.0) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.3g", v);
  }
  return buf;
}

// Feature labels contain '|', which would split a Markdown table cell.
std::string EscapeCell(std::string text) {
  for (std::size_t pos = 0; (pos = text.find('|', pos)) != std::string::npos; pos += 2) {
    text.insert(pos, 1, '\\');
  }
  return text;
}

const json* FindTarget(const json& doc, const std::string& name) {
  for (const json& row : doc.at("targets")) {
    if (row.at("target") == name) return &row;
  }
  return nullptr;
}

}  // namespace

Layout::Layout(fs::path workdir)
    : root(std::move(workdir)),
      data(root / "data"),
      features(root / "features"),
      schema(features / "schema.json"),
      train_csv(features / "train.csv"),
      test_csv(features / "test.csv"),
      models(root / "models"),
      shap(root / "shap"),
      aggregate(root / "aggregate"),
      prune_report(root / "prune" / "prune_report.json"),
      audit(root / "audit"),
      audit_report(audit / "audit_report.json"),
      report_json(root / "report.json"),
      report_md(root / "report.md") {}

fs::path Layout::Forest(Target t) const { return models / ("forest_" + Name(t) + ".json"); }
fs::path Layout::ShapCsv(Target t) const { return shap / ("shap_" + Name(t) + ".csv"); }
fs::path Layout::ShapSidecar(Target t) const { return shap / ("shap_" + Name(t) + ".json"); }
fs::path Layout::AggregateDir(Target t) const { return aggregate / Name(t); }
fs::path Layout::Residuals(Target t) const { return audit / ("residuals_" + Name(t) + ".csv"); }

void GenData(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  Dataset ds;
  if (cfg.dataset_mode == DatasetMode::kSynthetic) {
    ds = GenerateSynthetic(cfg.SyntheticWithSeed());
  } else {
    if (!fs::exists(cfg.dataset_path / "manifest.json")) {
      throw ValidationError(cfg.dataset_path.string() +
                            ": not a dataset directory (manifest.json missing)");
    }
    ds = LoadDataset(cfg.dataset_path);
    if (fs::exists(layout.data) && fs::equivalent(cfg.dataset_path, layout.data)) {
      Log("gen-data", "dataset already lives in the workdir; nothing to copy");
      return;
    }
  }
  // The workdir copy is this stage's own output; clear it so a smaller
  // dataset never leaves stale cubes behind.
  fs::remove_all(layout.data);
  SaveDataset(ds, layout.data);
  Log("gen-data", std::to_string(ds.size()) + " samples, " + std::to_string(ds.axis.n_bands) +
                      " bands -> " + layout.data.string());
}

void Extract(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  const Dataset ds = LoadWorkdirDataset(layout);
  const FeatureTable table = ExtractDataset(ds, cfg.spatial);
  fs::create_directories(layout.features);
  SaveSchema(table.schema, layout.schema);
  const std::vector<std::size_t> train_rows = ds.Indices(Split::kTrain);
  const std::vector<std::size_t> test_rows = ds.Indices(Split::kTest);
  SaveFeatureTable(table.SelectRows(train_rows), layout.train_csv);
  SaveFeatureTable(table.SelectRows(test_rows), layout.test_csv);
  Log("extract", std::to_string(table.n_features()) + " features, " +
                     std::to_string(train_rows.size()) + " train / " +
                     std::to_string(test_rows.size()) + " test rows");
}

void Train(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  const Dataset ds = LoadWorkdirDataset(layout);
  const FeatureSchema schema = LoadWorkdirSchema(layout);
  const FeatureTable train = LoadSplit(layout, schema, Split::kTrain);
  fs::create_directories(layout.models);
  for (const Target t : kAllTargets) {
    const std::vector<double> y = TargetsFor(ds, train, t, Split::kTrain, layout.train_csv);
    const ForestParams params = cfg.ForestFor(t);
    const Forest forest = FitForest(train, y, params, Name(t));
    SaveForest(forest, layout.Forest(t));
    Log("train", Name(t) + ": " + std::to_string(params.n_trees) + " trees, seed " +
                     std::to_string(params.seed));
  }
}

void Explain(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  const FeatureSchema schema = LoadWorkdirSchema(layout);
  const FeatureTable test = LoadSplit(layout, schema, Split::kTest);
  fs::create_directories(layout.shap);
  for (const Target t : kAllTargets) {
    const Forest forest = LoadCheckedForest(layout, schema, t);
    const ShapMatrix sm = ExplainDataset(forest, test);
    CheckAdditivity(sm, forest, test);
    SaveShapMatrix(sm, schema, layout.ShapCsv(t), layout.ShapSidecar(t));
    Log("explain", Name(t) + ": " + std::to_string(sm.n_samples) + " test rows explained");
  }
}

void Aggregate(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  const FeatureSchema schema = LoadWorkdirSchema(layout);
  const FeatureTable test = LoadSplit(layout, schema, Split::kTest);
  for (const Target t : kAllTargets) {
    const ShapMatrix sm = LoadCheckedShap(layout, schema, test, t);
    const fs::path dir = layout.AggregateDir(t);
    fs::create_directories(dir);

    const std::vector<double> imp = GlobalImportance(sm);
    WriteImportanceCsv(imp, schema, dir / "importance.csv");
    WriteGroupsCsv(TransformationImportance(sm, schema, GroupImportanceMode::kAbsOfGroupSum),
                   TransformationImportance(sm, schema, GroupImportanceMode::kSumOfAbs),
                   dir / "groups.csv");
    WriteHeatmap(BandTransformationMatrix(sm, schema, cfg.n_bins), dir / "heatmap.csv",
                 dir / "heatmap.json");
    const int top = RankByImportance(imp).front();
    WriteDependencyCsv(DependencyData(sm, test, top), sm.sample_ids, dir / "dependency.csv");
    const std::size_t top_m = std::min<std::size_t>(cfg.top_m, schema.size());
    WriteBeeswarmCsv(BeeswarmData(sm, test, top_m), schema, dir / "beeswarm.csv");
    Log("aggregate", Name(t) + ": top feature " + schema.Label(top));
  }
}

void Prune(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  const Dataset ds = LoadWorkdirDataset(layout);
  const FeatureSchema schema = LoadWorkdirSchema(layout);
  const FeatureTable train = LoadSplit(layout, schema, Split::kTrain);
  const FeatureTable test = LoadSplit(layout, schema, Split::kTest);
  const FeatureTable both = Stack(train, test);
  std::vector<Split> split(train.n_samples, Split::kTrain);
  split.resize(both.n_samples, Split::kTest);

  std::vector<PruneTargetReport> reports;
  for (const Target t : kAllTargets) {
    std::vector<double> y = TargetsFor(ds, train, t, Split::kTrain, layout.train_csv);
    const std::vector<double> y_test = TargetsFor(ds, test, t, Split::kTest, layout.test_csv);
    y.insert(y.end(), y_test.begin(), y_test.end());
    const PruningProblem problem{both, y, split, Name(t)};
    MinimalKResult result = MinimalK(problem, cfg.ForestFor(t), cfg.tol, cfg.ladder);
    Log("prune", Name(t) + ": " +
                     (result.k ? "k = " + std::to_string(*result.k) : std::string("no passing k")));
    reports.push_back({Name(t), std::move(result)});
  }
  fs::create_directories(layout.prune_report.parent_path());
  WritePruneReport(reports, cfg.tol, layout.prune_report);
}

void Audit(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  const Dataset ds = LoadWorkdirDataset(layout);
  const FeatureSchema schema = LoadWorkdirSchema(layout);
  const FeatureTable test = LoadSplit(layout, schema, Split::kTest);
  fs::create_directories(layout.audit);

  std::vector<AuditTargetReport> reports;
  for (const Target t : kAllTargets) {
    const Forest forest = LoadCheckedForest(layout, schema, t);
    const ShapMatrix sm = LoadCheckedShap(layout, schema, test, t);
    const std::vector<double> pred = PredictTable(forest, test);
    const std::vector<double> truth = TargetsFor(ds, test, t, Split::kTest, layout.test_csv);

    AuditTargetReport r;
    r.target = Name(t);
    r.mae = Mae(pred, truth);
    r.residuals = SummarizeResiduals(pred, truth);
    r.red_flags = DetectRedFlags(r.residuals, GlobalImportance(sm), cfg.thresholds);
    r.extremes = ExplainExtremes(sm, pred, truth, static_cast<std::size_t>(cfg.n_extremes));
    WriteResidualsCsv(r.residuals, layout.Residuals(t));

    std::string flags;
    for (const RedFlag f : r.red_flags.flags) flags += " " + std::string(RedFlagName(f));
    Log("audit", Name(t) + ": MAE " + FormatMae(r.mae) +
                     (flags.empty() ? ", no red flags" : ", flags:" + flags));
    reports.push_back(std::move(r));
  }
  WriteAuditReport(reports, cfg.thresholds, schema, layout.audit_report);
}

void Report(const RunConfig& cfg) {
  cfg.Validate();
  const Layout layout(cfg.workdir);
  const Dataset ds = LoadWorkdirDataset(layout);
  const FeatureSchema schema = LoadWorkdirSchema(layout);
  const FeatureTable test = LoadSplit(layout, schema, Split::kTest);
  const json prune = ReadJson(layout.prune_report, "prune");
  const json audit = ReadJson(layout.audit_report, "audit");

  json report;
  report["version"] = "v1";
  report["config"] = cfg.ToJson();
  report["dataset"] = {{"provenance", ds.provenance},
                       {"n_train", ds.Indices(Split::kTrain).size()},
                       {"n_test", ds.Indices(Split::kTest).size()},
                       {"n_bands", ds.axis.n_bands},
                       {"lambda_min_nm", ds.axis.lambda_min_nm},
                       {"lambda_max_nm", ds.axis.lambda_max_nm}};
  report["schema"] = {{"fingerprint", schema.Fingerprint()},
                      {"n_features", schema.size()},
                      {"spatial", schema.spatial_enabled}};
  report["prune_tol"] = prune.at("tol");

  json targets = json::array();
  for (const Target t : kAllTargets) {
    const std::string name = Name(t);
    const Forest forest = LoadCheckedForest(layout, schema, t);
    const ShapMatrix sm = LoadCheckedShap(layout, schema, test, t);
    const json* prune_row = FindTarget(prune, name);
    const json* audit_row = FindTarget(audit, name);
    if (prune_row == nullptr) {
      throw ValidationError(layout.prune_report.string() + ": no row for " + name);
    }
    if (audit_row == nullptr) {
      throw ValidationError(layout.audit_report.string() + ": no row for " + name);
    }

    const std::vector<double> imp = GlobalImportance(sm);
    json top = json::array();
    const std::vector<int> order = RankByImportance(imp);
    for (std::size_t i = 0; i < std::min(kReportTopFeatures, order.size()); ++i) {
      top.push_back({{"feature_id", order[i]},
                     {"label", schema.Label(order[i])},
                     {"importance", imp[order[i]]}});
    }
    const auto groups = TransformationImportance(sm, schema);
    json group_json = json::object();
    for (const auto& g : groups) group_json[std::string(GroupName(g.group))] = g.importance;
    const auto dominant = std::max_element(
        groups.begin(), groups.end(),
        [](const auto& a, const auto& b) { return a.importance < b.importance; });

    json selected = json::array();
    for (const json& id : prune_row->at("selected_ids")) {
      selected.push_back(schema.Label(id.get<int>()));
    }

    targets.push_back({
        {"target", name},
        {"model_fingerprint", HexDigest(Fnv1a64(ForestToJson(forest)))},
        {"test_mae", audit_row->at("mae")},
        {"top_features", top},
        {"group_importance", group_json},
        {"dominant_group", std::string(GroupName(dominant->group))},
        {"prune",
         {{"full_feature_count", prune_row->at("full_feature_count")},
          {"full_mae", prune_row->at("full_mae")},
          {"k", prune_row->at("k")},
          {"pruned_mae", prune_row->at("pruned_mae")},
          {"ratio", prune_row->at("ratio")},
          {"percent_delta", prune_row->at("percent_delta")},
          {"selected_features", selected}}},
        {"red_flags", audit_row->at("red_flags").at("flags")},
    });
  }
  report["targets"] = std::move(targets);

  WriteText(layout.report_json, report.dump(2) + "\n");
  WriteText(layout.report_md, ReportMarkdown(report));
  Log("report", "wrote " + layout.report_json.string() + " and " + layout.report_md.string());
}

void RunAll(const RunConfig& cfg) {
  GenData(cfg);
  Extract(cfg);
  Train(cfg);
  Explain(cfg);
  Aggregate(cfg);
  Prune(cfg);
  Audit(cfg);
  Report(cfg);
}

std::string ReportMarkdown(const json& report) {
  const json& targets = report.at("targets");
  const auto num = [](const json& v) { return v.is_number() ? FormatMae(v.get<double>()) : "n/a"; };

  std::ostringstream md;
  md << "# hyperaudit report\n\n";
  const json& ds = report.at("dataset");
  md << "Dataset `" << ds.at("provenance").get<std::string>() << "`: " << ds.at("n_train")
     << " train / " << ds.at("n_test") << " test samples, " << ds.at("n_bands") << " bands, "
     << report.at("schema").at("n_features") << " features"
     << (report.at("schema").at("spatial").get<bool>() ? " (spatial)" : "") << ".\n\n";

  md << "## Test MAE with all features and after pruning\n\n";
  md << "Pruned models keep the smallest ladder k whose MAE stays within "
     << std::lround(100.0 * report.at("prune_tol").get<double>())
     << "% of the full model; the percentage is the change against the full model.\n\n";
  md << "| F. selection |";
  for (const json& t : targets) md << " " << t.at("target").get<std::string>() << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < targets.size(); ++i) md << "---|";
  md << "\n| all (" << report.at("schema").at("n_features") << ") |";
  for (const json& t : targets) md << " " << num(t.at("prune").at("full_mae")) << " |";
  md << "\n| top-k |";
  for (const json& t : targets) {
    const json& p = t.at("prune");
    if (p.at("k").is_null()) {
      md << " n/a |";
    } else {
      md << " " << num(p.at("pruned_mae")) << " (" << p.at("percent_delta").get<std::string>()
         << "), k=" << p.at("k") << " |";
    }
  }
  md << "\n\n";

  md << "## Audit\n\n";
  md << "| Target | Test MAE | Dominant group | Red flags | Top features |\n";
  md << "|---|---|---|---|---|\n";
  for (const json& t : targets) {
    std::string flags;
    for (const json& f : t.at("red_flags")) {
      flags += (flags.empty() ? "" : ", ") + f.get<std::string>();
    }
    std::string top;
    for (const json& f : t.at("top_features")) {
      top += (top.empty() ? "`" : ", `") + EscapeCell(f.at("label").get<std::string>()) + "`";
    }
    md << "| " << t.at("target").get<std::string>() << " | " << num(t.at("test_mae")) << " | "
       << t.at("dominant_group").get<std::string>() << " | " << (flags.empty() ? "none" : flags)
       << " | " << top << " |\n";
  }
  return md.str();
}

}  // namespace hyperaudit::cli
