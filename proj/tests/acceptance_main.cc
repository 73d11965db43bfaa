// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Criteria 8 and 9 drive the CLI binary end to end.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "hyperaudit/aggregation.h"
#include "hyperaudit/audit.h"
#include "hyperaudit/features.h"
#include "hyperaudit/forest.h"
#include "hyperaudit/pruning.h"
#include "hyperaudit/pruning_io.h"
#include "hyperaudit/random.h"
#include "hyperaudit/shap.h"
#include "hyperaudit/synthetic.h"
#include "json.hpp"
#include "test_util.h"

namespace hyperaudit {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Shared by criteria 2, 3 and 7: 200 samples of 16x16 patches over 50
// bands, one forest per target fitted on the train split and explained on
// every sample.
struct ExplainedDataset {
  FeatureTable table;
  std::vector<Forest> forests;
  std::vector<ShapMatrix> shap;
};

const ExplainedDataset& Criterion2Data() {
  static const ExplainedDataset data = [] {
    SyntheticConfig cfg;
    cfg.n_train = 150;
    cfg.n_test = 50;
    cfg.min_side = 16;
    cfg.max_side = 16;
    cfg.seed = 2;
    const Dataset ds = GenerateSynthetic(cfg);
    ExplainedDataset out;
    out.table = ExtractDataset(ds, false);
    const FeatureTable train = out.table.SelectRows(ds.Indices(Split::kTrain));
    for (const Target t : kAllTargets) {
      std::vector<double> y;
      for (const std::size_t r : ds.Indices(Split::kTrain)) y.push_back(ds.targets[r].Get(t));
      ForestParams params;
      params.seed = TargetSeed(cfg.seed, t);
      out.forests.push_back(FitForest(train, y, params, std::string(TargetName(t))));
      out.shap.push_back(ExplainDataset(out.forests.back(), out.table));
    }
    return out;
  }();
  return data;
}

Outcome OracleEquivalence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  int pairs = 0;

  // Hand-shaped random forests over 10 active features out of 14.
  for (int i = 0; i < 60; ++i) {
    std::vector<int> pool(14);
    for (int f = 0; f < 14; ++f) pool[f] = f;
    for (int f = 0; f < 10; ++f) std::swap(pool[f], pool[f + rng.Index(14 - f)]);
    pool.resize(10);
    std::vector<Tree> trees;
    const int n_trees = 1 + static_cast<int>(rng.Index(5));
    for (int t = 0; t < n_trees; ++t) {
      trees.push_back(testing::RandomTree(rng, 1 + static_cast<int>(rng.Index(4)), pool));
    }
    const Forest forest = testing::MakeForest(std::move(trees), 14);
    std::vector<double> x(14);
    for (double& v : x) v = rng.Uniform();
    const std::vector<double> fast = TreeShap(forest, x);
    const std::vector<double> slow = BruteShap(forest, x);
    for (std::size_t f = 0; f < x.size(); ++f) worst = std::max(worst, std::abs(fast[f] - slow[f]));
    ++pairs;
  }

  // Fitted forests on random regression data with 10 features.
  for (int i = 0; i < 60; ++i) {
    FeatureTable table;
    table.schema = BuildSchema(BandAxis{4, 400.0, 900.0}, false);
    table.schema.entries.resize(10);
    table.n_samples = 80;
    std::vector<double> y;
    for (std::size_t r = 0; r < table.n_samples; ++r) {
      double target = 0.0;
      for (int f = 0; f < 10; ++f) {
        const double v = rng.Uniform();
        table.matrix.push_back(v);
        target += (f % 3 == 0 ? 2.0 : 0.5) * v * (f % 2 == 0 ? 1.0 : -1.0);
      }
      y.push_back(target + 0.1 * rng.Normal());
      table.sample_ids.push_back(static_cast<int>(r));
    }
    ForestParams params;
    params.n_trees = 1 + static_cast<int>(rng.Index(5));
    params.max_depth = 4;
    params.min_samples_leaf = 1;
    params.features_per_split = 0.5;
    params.seed = 7000 + i;
    const Forest forest = FitForest(table, y, params);
    const auto x = table.Row(rng.Index(table.n_samples));
    const std::vector<double> fast = TreeShap(forest, x);
    const std::vector<double> slow = BruteShap(forest, x);
    for (std::size_t f = 0; f < x.size(); ++f) worst = std::max(worst, std::abs(fast[f] - slow[f]));
    ++pairs;
  }

  const double elapsed = Seconds(start);
  return {worst <= 1e-9 && elapsed < 60.0,
          std::to_string(pairs) + " pairs, max |treeshap - brute| = " + Fmt("%.3g", worst) +
              ", " + Fmt("%.1f", elapsed) + " s"};
}

Outcome LocalAccuracy() {
  const ExplainedDataset& d = Criterion2Data();
  double worst = 0.0;
  for (std::size_t t = 0; t < d.forests.size(); ++t) {
    worst = std::max(worst, MaxAdditivityError(d.shap[t], d.forests[t], d.table));
  }
  return {worst <= 1e-6, std::to_string(d.table.n_samples) +
                             " samples x 4 targets, max relative error " + Fmt("%.3g", worst)};
}

Outcome DummyExactness() {
  const ExplainedDataset& d = Criterion2Data();
  constexpr int kDummies = 12;
  // Append constant columns: no split can separate rows on them, so the
  // refitted forest never uses them.
  FeatureTable table = d.table;
  const std::size_t p = table.n_features();
  for (int k = 0; k < kDummies; ++k) {
    table.schema.entries.push_back(
        {static_cast<int>(p + k), TransformationGroup::kMeta, std::nullopt});
  }
  table.matrix.clear();
  for (std::size_t r = 0; r < table.n_samples; ++r) {
    const auto row = d.table.Row(r);
    table.matrix.insert(table.matrix.end(), row.begin(), row.end());
    for (int k = 0; k < kDummies; ++k) table.matrix.push_back(0.25 * (k + 1));
  }
  std::vector<double> y(table.n_samples);
  Rng rng(5);
  for (std::size_t r = 0; r < table.n_samples; ++r) {
    y[r] = table.At(r, 8) * 10.0 + rng.Normal(0.0, 0.1);
  }

  ForestParams params;
  params.n_trees = 60;
  params.features_per_split = 1.0;
  params.seed = 17;
  const Forest forest = FitForest(table, y, params);
  const ShapMatrix sm = ExplainDataset(forest, table);

  std::size_t nonzero = 0;
  const std::vector<int> used = forest.UsedFeatures();
  bool dummy_used = false;
  for (int k = 0; k < kDummies; ++k) {
    const int f = static_cast<int>(p + k);
    dummy_used |= std::binary_search(used.begin(), used.end(), f);
    for (std::size_t r = 0; r < sm.n_samples; ++r) nonzero += sm.At(r, f) != 0.0;
  }
  return {!dummy_used && nonzero == 0,
          std::to_string(kDummies) + " dummy features x " + std::to_string(sm.n_samples) +
              " samples, " + std::to_string(nonzero) + " nonzero attributions"};
}

Outcome PlantedBandRecovery() {
  int worst_hits = 5;
  std::string per_target;
  std::array<int, 4> hits{};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.noise_sd = 0.01;
    const Dataset ds = GenerateSynthetic(cfg);
    const FeatureTable table = ExtractDataset(ds, false);
    const FeatureTable train = table.SelectRows(ds.Indices(Split::kTrain));
    const FeatureTable test = table.SelectRows(ds.Indices(Split::kTest));
    for (const Target t : kAllTargets) {
      std::vector<double> y;
      for (const std::size_t r : ds.Indices(Split::kTrain)) y.push_back(ds.targets[r].Get(t));
      ForestParams params;
      params.seed = TargetSeed(seed, t);
      const Forest forest = FitForest(train, y, params);
      const std::vector<double> imp = GlobalImportance(ExplainDataset(forest, test));
      const std::vector<int> top = RankByImportance(imp);
      const int planted = cfg.planted_bands[static_cast<int>(t)].front();
      bool hit = false;
      for (std::size_t i = 0; i < 5; ++i) {
        const auto band = table.schema.entries[top[i]].band;
        hit |= band && std::abs(*band - planted) <= 1;
      }
      hits[static_cast<int>(t)] += hit;
    }
  }
  for (const Target t : kAllTargets) {
    const int h = hits[static_cast<int>(t)];
    worst_hits = std::min(worst_hits, h);
    per_target += std::string(per_target.empty() ? "" : ", ") + std::string(TargetName(t)) + " " +
                  std::to_string(h) + "/5";
  }
  return {worst_hits >= 4, "seeds with a planted band (+-1) in the top 5: " + per_target};
}

Outcome PruningParity() {
  std::array<int, 4> small_k{};
  bool format_ok = true;
  std::string bad_format;
  const std::regex table_style(R"(^(0|[+-][1-9][0-9]*)%$)");
  std::string ks;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    const Dataset ds = GenerateSynthetic(cfg);
    const FeatureTable table = ExtractDataset(ds, false);
    std::vector<PruneTargetReport> reports;
    for (const Target t : kAllTargets) {
      ForestParams params;
      params.seed = TargetSeed(seed, t);
      MinimalKResult r = MinimalK(ds, table, t, params, 0.10);
      small_k[static_cast<int>(t)] += r.k && *r.k <= 8;
      ks += (ks.empty() ? "" : " ") + std::string(TargetName(t)) + "=" +
            (r.k ? std::to_string(*r.k) : std::string("none"));
      reports.push_back({std::string(TargetName(t)), std::move(r)});
    }
    const nlohmann::json report = nlohmann::json::parse(PruneReportJson(reports, 0.10));
    for (const auto& row : report.at("targets")) {
      const std::string delta = row.at("percent_delta").get<std::string>();
      if (!std::regex_match(delta, table_style)) {
        format_ok = false;
        bad_format = delta;
      }
      for (const auto& point : row.at("ladder")) {
        if (!std::regex_match(point.at("percent_delta").get<std::string>(), table_style)) {
          format_ok = false;
          bad_format = point.at("percent_delta").get<std::string>();
        }
      }
    }
    ks += ";";
  }
  int worst = 5;
  for (const int c : small_k) worst = std::min(worst, c);
  return {worst >= 4 && format_ok,
          "seeds with k <= 8, worst target " + std::to_string(worst) + "/5 [" + ks + "]" +
              (format_ok ? ", deltas in table style" : ", bad delta '" + bad_format + "'")};
}

Outcome RedFlags() {
  Rng rng(23);
  // Constant predictor: every prediction is the truth mean, attributions 0.
  SyntheticConfig cfg;
  const Dataset ds = GenerateSynthetic(cfg);
  const std::vector<double> truth = ds.TargetColumn(Target::kK);
  double mean = 0.0;
  for (const double v : truth) mean += v / static_cast<double>(truth.size());
  const std::vector<double> constant(truth.size(), mean);
  const RedFlagReport constant_flags =
      DetectRedFlags(SummarizeResiduals(constant, truth), std::vector<double>(197, 0.0));

  // One dominant feature among 500.
  FeatureTable table;
  table.schema = BuildSchema(BandAxis{126, 400.0, 900.0}, false);
  table.schema.entries.resize(500);
  table.n_samples = 300;
  std::vector<double> y;
  for (std::size_t r = 0; r < table.n_samples; ++r) {
    for (int f = 0; f < 500; ++f) table.matrix.push_back(rng.Uniform());
    y.push_back(10.0 * table.At(r, 0) + 0.05 * rng.Normal());
    table.sample_ids.push_back(static_cast<int>(r));
  }
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t r = 0; r < table.n_samples; ++r) (r < 200 ? train_rows : test_rows).push_back(r);
  const FeatureTable train = table.SelectRows(train_rows);
  const FeatureTable test = table.SelectRows(test_rows);
  std::vector<double> y_train(y.begin(), y.begin() + 200), y_test(y.begin() + 200, y.end());
  ForestParams params;
  params.n_trees = 100;
  params.seed = 3;
  const Forest forest = FitForest(train, y_train, params);
  const RedFlagReport dominant_flags =
      DetectRedFlags(SummarizeResiduals(PredictTable(forest, test), y_test),
                     GlobalImportance(ExplainDataset(forest, test)));

  // Perfect predictor of a dense linear truth; the exact attributions of a
  // linear model are w_i * (x_i - mean_i).
  constexpr int kFeatures = 50, kRows = 200;
  std::vector<std::vector<double>> x(kRows, std::vector<double>(kFeatures));
  std::vector<double> col_mean(kFeatures, 0.0);
  std::vector<double> lin_truth(kRows, 0.0);
  for (int r = 0; r < kRows; ++r) {
    for (int f = 0; f < kFeatures; ++f) {
      x[r][f] = rng.Uniform();
      col_mean[f] += x[r][f] / kRows;
      lin_truth[r] += x[r][f];
    }
  }
  ShapMatrix sm;
  sm.n_samples = kRows;
  sm.n_features = kFeatures;
  for (int r = 0; r < kRows; ++r) {
    for (int f = 0; f < kFeatures; ++f) sm.values.push_back(x[r][f] - col_mean[f]);
  }
  const RedFlagReport perfect_flags =
      DetectRedFlags(SummarizeResiduals(lin_truth, lin_truth), GlobalImportance(sm));

  const bool pass = constant_flags.Has(RedFlag::kRangeCollapse) &&
                    dominant_flags.Has(RedFlag::kConcentratedImportance) &&
                    perfect_flags.flags.empty();
  const auto names = [](const RedFlagReport& r) {
    std::string s;
    for (const RedFlag f : r.flags) s += (s.empty() ? "" : "+") + std::string(RedFlagName(f));
    return s.empty() ? std::string("none") : s;
  };
  const double subset = dominant_flags.evidence.at("concentration_subset_size");
  return {pass, "constant: " + names(constant_flags) + "; dominant-of-500: " +
                    names(dominant_flags) + " (subset " + Fmt("%.0f", subset) +
                    "); perfect: " + names(perfect_flags)};
}

Outcome AggregationConservation() {
  const ExplainedDataset& d = Criterion2Data();
  const GroupMap by_group = GroupMap::ByTransformation(d.table.schema);
  const GroupMap by_band = GroupMap::ByBand(d.table.schema);
  double worst = 0.0;
  std::size_t rows = 0;
  for (const ShapMatrix& sm : d.shap) {
    for (std::size_t r = 0; r < sm.n_samples; ++r) {
      const auto phi = sm.Row(r);
      double total = 0.0;
      for (const double v : phi) total += v;
      for (const GroupMap* gm : {&by_group, &by_band}) {
        double grouped = 0.0;
        for (const double v : GroupAttribution(phi, *gm)) grouped += v;
        worst = std::max(worst, std::abs(grouped - total));
      }
      ++rows;
    }
  }
  return {by_group.coverage() && by_band.coverage() && worst <= 1e-12,
          std::to_string(rows) + " rows, transformation and band groupings, max |diff| = " +
              Fmt("%.3g", worst)};
}

int Cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd =
      std::string(HYPERAUDIT_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criteria 8 and 9 share two default-config runs of the whole chain.
struct EndToEnd {
  int exit_a = -1;
  int exit_b = -1;
  double seconds_a = 0.0;
  double seconds_b = 0.0;
  std::string report_a;
  std::string report_b;
};

const EndToEnd& EndToEndRuns() {
  static const EndToEnd runs = [] {
    EndToEnd e;
    const testing::TempDir a("acceptance_a");
    const testing::TempDir b("acceptance_b");
    // Defaults: 200 train + 80 test samples, 50 bands, 200 trees per target.
    const std::string common = " --seed 2024";
    auto start = std::chrono::steady_clock::now();
    e.exit_a = Cli("run -w " + (a.path() / "work").string() + common, a.path() / "log.txt");
    e.seconds_a = Seconds(start);
    start = std::chrono::steady_clock::now();
    e.exit_b = Cli("run -w " + (b.path() / "work").string() + common + " --threads 1",
                   b.path() / "log.txt");
    e.seconds_b = Seconds(start);
    e.report_a = Slurp(a.path() / "work/report.json");
    e.report_b = Slurp(b.path() / "work/report.json");
    return e;
  }();
  return runs;
}

Outcome Determinism() {
  const EndToEnd& e = EndToEndRuns();
  const bool same = !e.report_a.empty() && e.report_a == e.report_b;
  return {e.exit_a == 0 && e.exit_b == 0 && same,
          "exit codes " + std::to_string(e.exit_a) + "/" + std::to_string(e.exit_b) +
              ", report.json " + (same ? "byte-identical" : "differs") + " (" +
              std::to_string(e.report_a.size()) + " bytes)"};
}

Outcome DeskScaleRuntime() {
  const EndToEnd& e = EndToEndRuns();
  const double worst = std::max(e.seconds_a, e.seconds_b);
  return {e.exit_a == 0 && e.exit_b == 0 && worst < 180.0,
          "full pipeline " + Fmt("%.1f", e.seconds_a) + " s and " + Fmt("%.1f", e.seconds_b) +
              " s (limit 180 s)"};
}

}  // namespace
}  // namespace hyperaudit

int main() {
  using hyperaudit::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", hyperaudit::OracleEquivalence},
      {"local accuracy", hyperaudit::LocalAccuracy},
      {"dummy exactness", hyperaudit::DummyExactness},
      {"planted-band recovery", hyperaudit::PlantedBandRecovery},
      {"pruning parity", hyperaudit::PruningParity},
      {"red flags", hyperaudit::RedFlags},
      {"aggregation conservation", hyperaudit::AggregationConservation},
      {"determinism", hyperaudit::Determinism},
      {"desk-scale runtime", hyperaudit::DeskScaleRuntime},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
