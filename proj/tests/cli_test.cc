#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "commands.h"
#include "config.h"
#include "gtest/gtest.h"
#include "hyperaudit/errors.h"
#include "hyperaudit/forest_io.h"
#include "json.hpp"
#include "test_util.h"

namespace hyperaudit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

// Small enough to run the whole chain in a few seconds.
const std::string kSmall =
    " --seed 11 --n-train 60 --n-test 24 --min-side 8 --max-side 12 --n-trees 20"
    " --ladder 1,2,3,5";

int Cli(const std::string& args) {
  const std::string cmd = std::string(HYPERAUDIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

TEST(CliChainTest, FullRunProducesEveryArtifact) {
  const TempDir dir("cli_full");
  const fs::path w = dir.path();
  ASSERT_EQ(Cli("run --workdir " + w.string() + kSmall), 0);

  std::vector<fs::path> expected = {"data/manifest.json", "features/schema.json",
                                    "features/train.csv", "features/test.csv",
                                    "prune/prune_report.json", "audit/audit_report.json",
                                    "report.json", "report.md"};
  for (const std::string t : {"P", "K", "Mg", "pH"}) {
    expected.push_back("models/forest_" + t + ".json");
    expected.push_back("shap/shap_" + t + ".csv");
    expected.push_back("shap/shap_" + t + ".json");
    expected.push_back("audit/residuals_" + t + ".csv");
    for (const char* f : {"importance.csv", "groups.csv", "heatmap.csv", "heatmap.json",
                          "dependency.csv", "beeswarm.csv"}) {
      expected.push_back(fs::path("aggregate") / t / f);
    }
  }
  for (const fs::path& p : expected) EXPECT_TRUE(fs::exists(w / p)) << p;

  const json report = json::parse(Slurp(w / "report.json"));
  EXPECT_EQ(report.at("targets").size(), 4u);
  EXPECT_EQ(report.at("config").at("forest").at("n_trees"), 20);
  EXPECT_EQ(report.dump().find(w.string()), std::string::npos) << "report embeds a local path";

  const std::string md = Slurp(w / "report.md");
  EXPECT_TRUE(std::regex_search(md, std::regex(R"(\((\+|-)?[0-9]+%\))"))) << md;
}

TEST(CliChainTest, StagesRunSeparatelyMatchTheOneShotRun) {
  const TempDir a("cli_oneshot");
  const TempDir b("cli_staged");
  ASSERT_EQ(Cli("run -w " + a.path().string() + kSmall), 0);
  for (const char* stage :
       {"gen-data", "extract", "train", "explain", "aggregate", "prune", "audit", "report"}) {
    ASSERT_EQ(Cli(std::string(stage) + " -w " + b.path().string() + kSmall), 0) << stage;
  }
  EXPECT_EQ(Slurp(a.path() / "report.json"), Slurp(b.path() / "report.json"));
}

TEST(CliChainTest, ReportIsByteIdenticalAcrossRunsAndThreadCaps) {
  const TempDir a("cli_det_a");
  const TempDir b("cli_det_b");
  ASSERT_EQ(Cli("run -w " + a.path().string() + kSmall + " --threads 1"), 0);
  ASSERT_EQ(Cli("run -w " + b.path().string() + kSmall + " --threads 3"), 0);
  const std::string ra = Slurp(a.path() / "report.json");
  ASSERT_FALSE(ra.empty());
  EXPECT_EQ(ra, Slurp(b.path() / "report.json"));
  EXPECT_EQ(Slurp(a.path() / "report.md"), Slurp(b.path() / "report.md"));

  // Re-running a stage leaves its outputs unchanged and does not touch inputs.
  const std::string schema_before = Slurp(a.path() / "features/schema.json");
  ASSERT_EQ(Cli("report -w " + a.path().string() + kSmall), 0);
  EXPECT_EQ(ra, Slurp(a.path() / "report.json"));
  EXPECT_EQ(schema_before, Slurp(a.path() / "features/schema.json"));
}

TEST(CliChainTest, LoadedDatasetGivesTheSameResultsAsGenerated) {
  const TempDir a("cli_generated");
  const TempDir b("cli_loaded");
  ASSERT_EQ(Cli("run -w " + a.path().string() + kSmall), 0);
  ASSERT_EQ(Cli("run -w " + b.path().string() + kSmall + " --dataset " +
                (a.path() / "data").string()),
            0);
  json ra = json::parse(Slurp(a.path() / "report.json"));
  json rb = json::parse(Slurp(b.path() / "report.json"));
  EXPECT_EQ(rb.at("config").at("dataset").at("mode"), "load");
  EXPECT_EQ(ra.at("dataset"), rb.at("dataset"));
  EXPECT_EQ(ra.at("targets"), rb.at("targets"));
  EXPECT_EQ(Cli("gen-data -w " + b.path().string() + kSmall + " --dataset " +
                (b.path() / "nowhere").string()),
            2);
}

TEST(CliErrorTest, ExplainWithStaleModelsIsValidationError) {
  const TempDir dir("cli_stale");
  const std::string w = " -w " + dir.path().string() + kSmall;
  ASSERT_EQ(Cli("gen-data" + w), 0);
  ASSERT_EQ(Cli("extract" + w), 0);
  ASSERT_EQ(Cli("train" + w), 0);
  // New schema, old forests: fingerprints no longer agree.
  ASSERT_EQ(Cli("extract --spatial" + w), 0);
  EXPECT_EQ(Cli("explain --spatial" + w), 2);
}

TEST(CliErrorTest, UsageErrorsExitOne) {
  EXPECT_EQ(Cli(""), 1);
  EXPECT_EQ(Cli("no-such-command"), 1);
  EXPECT_EQ(Cli("run --n-trees many -w /tmp/x --seed 1"), 1);
  EXPECT_EQ(Cli("run --not-a-flag -w /tmp/x --seed 1"), 1);
  EXPECT_EQ(Cli("--help"), 0);
}

TEST(CliErrorTest, ValidationErrorsExitTwo) {
  const TempDir dir("cli_invalid");
  const std::string w = dir.path().string();
  EXPECT_EQ(Cli("gen-data -w " + w), 2) << "seed is required";
  EXPECT_EQ(Cli("explain -w " + w + " --seed 1"), 2) << "inputs missing";
  EXPECT_EQ(Cli("gen-data -w " + w + " --seed 1 --n-train 0"), 2);
  EXPECT_EQ(Cli("gen-data -w " + w + " --seed 1 --min-side 9 --max-side 8"), 2);

  WriteFile(dir.path() / "bad_key.json", R"({"version": "v1", "seed": 1, "forests": {}})");
  EXPECT_EQ(Cli("gen-data -w " + w + " -c " + (dir.path() / "bad_key.json").string()), 2);
  WriteFile(dir.path() / "bad_version.json", R"({"version": "v2", "seed": 1})");
  EXPECT_EQ(Cli("gen-data -w " + w + " -c " + (dir.path() / "bad_version.json").string()), 2);
  WriteFile(dir.path() / "truncated.json", R"({"version": "v1", "seed": )");
  EXPECT_EQ(Cli("gen-data -w " + w + " -c " + (dir.path() / "truncated.json").string()), 2);
}

TEST(CliConfigTest, FlagsWinOverConfigFile) {
  const TempDir dir("cli_override");
  const fs::path cfg = dir.path() / "config.json";
  WriteFile(cfg, R"({
    "version": "v1",
    "seed": 4,
    "dataset": {"synthetic": {"n_train": 40, "n_test": 15, "min_side": 8, "max_side": 10}},
    "forest": {"n_trees": 5},
    "forest_overrides": {"pH": {"n_trees": 9, "max_depth": 3}}
  })");
  const std::string w = " -w " + (dir.path() / "work").string() + " -c " + cfg.string();
  ASSERT_EQ(Cli("gen-data" + w), 0);
  ASSERT_EQ(Cli("extract" + w), 0);
  ASSERT_EQ(Cli("train" + w), 0);
  EXPECT_EQ(LoadForest(dir.path() / "work/models/forest_P.json").trees.size(), 5u);
  const Forest ph = LoadForest(dir.path() / "work/models/forest_pH.json");
  EXPECT_EQ(ph.trees.size(), 9u);
  EXPECT_EQ(ph.params.max_depth, 3);

  ASSERT_EQ(Cli("train --n-trees 7" + w), 0);
  EXPECT_EQ(LoadForest(dir.path() / "work/models/forest_P.json").trees.size(), 7u);
  const Forest ph2 = LoadForest(dir.path() / "work/models/forest_pH.json");
  EXPECT_EQ(ph2.trees.size(), 7u) << "flag beats the per-target patch";
  EXPECT_EQ(ph2.params.max_depth, 3) << "untouched patch keys survive";
}

TEST(CliConfigTest, ParsesDocumentedSchema) {
  const cli::RunConfig cfg = cli::ConfigFromJson(json::parse(R"({
    "version": "v1",
    "seed": 42,
    "workdir": "out",
    "dataset": {"mode": "synthetic",
                "synthetic": {"n_train": 10, "n_test": 5, "planted_bands": [[1], [2, 3], [4], [5]]}},
    "spatial": true,
    "forest": {"n_trees": 50, "bootstrap": false},
    "prune": {"tol": 0.05, "ladder": [1, 4]},
    "aggregate": {"n_bins": 5, "top_m": 7},
    "audit": {"sd_ratio": 0.4, "n_extremes": 2}
  })"));
  EXPECT_EQ(cfg.MasterSeed(), 42u);
  EXPECT_EQ(cfg.workdir, "out");
  EXPECT_TRUE(cfg.spatial);
  EXPECT_EQ(cfg.synthetic.planted_bands[1], (std::vector<int>{2, 3}));
  EXPECT_EQ(cfg.forest.n_trees, 50);
  EXPECT_FALSE(cfg.forest.bootstrap);
  EXPECT_EQ(cfg.ladder, (std::vector<int>{1, 4}));
  EXPECT_DOUBLE_EQ(cfg.tol, 0.05);
  EXPECT_EQ(cfg.n_bins, 5);
  EXPECT_DOUBLE_EQ(cfg.thresholds.sd_ratio, 0.4);
  EXPECT_DOUBLE_EQ(cfg.thresholds.coverage, 0.9);
  EXPECT_EQ(cfg.n_extremes, 2);
  EXPECT_EQ(cfg.ForestFor(Target::kK).seed, TargetSeed(42, Target::kK));
  EXPECT_NO_THROW(cfg.Validate());

  // The embedded form parses back to the same settings.
  const cli::RunConfig again = cli::ConfigFromJson(cfg.ToJson());
  EXPECT_EQ(again.ToJson(), cfg.ToJson());
}

TEST(CliConfigTest, RejectsMalformedDocuments) {
  EXPECT_THROW(cli::ConfigFromJson(json::parse(R"({"seed": 1})")), ValidationError);
  EXPECT_THROW(cli::ConfigFromJson(json::parse(R"({"version": "v1", "seed": -1})")),
               ValidationError);
  EXPECT_THROW(cli::ConfigFromJson(json::parse(R"({"version": "v1", "forest": {"trees": 3}})")),
               ValidationError);
  EXPECT_THROW(cli::ConfigFromJson(json::parse(R"({"version": "v1", "spatial": "yes"})")),
               ValidationError);
  EXPECT_THROW(
      cli::ConfigFromJson(json::parse(R"({"version": "v1", "forest_overrides": {"Ca": {}}})")),
      ValidationError);

  cli::RunConfig cfg = cli::DefaultConfig();
  cfg.workdir = "w";
  EXPECT_THROW(cfg.Validate(), ValidationError) << "no seed";
  cfg.seed = 3;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.ladder = {3, 2};
  EXPECT_THROW(cfg.Validate(), ValidationError);
}

TEST(ReportMarkdownTest, PercentDeltasUseTableStyle) {
  const json report = json::parse(R"({
    "dataset": {"provenance": "synthetic:abc", "n_train": 10, "n_test": 5, "n_bands": 50},
    "schema": {"n_features": 197, "spatial": false},
    "prune_tol": 0.1,
    "targets": [
      {"target": "P", "test_mae": 22.6, "dominant_group": "grad1", "red_flags": [],
       "top_features": [{"label": "g:grad1|b:8"}],
       "prune": {"full_mae": 22.6, "pruned_mae": 23.3, "percent_delta": "+3%", "k": 3}},
      {"target": "pH", "test_mae": 0.206, "dominant_group": "mean_spectrum",
       "red_flags": ["RANGE_COLLAPSE"], "top_features": [],
       "prune": {"full_mae": 0.206, "pruned_mae": null, "percent_delta": "n/a", "k": null}}
    ]
  })");
  const std::string md = cli::ReportMarkdown(report);
  EXPECT_NE(md.find("| F. selection | P | pH |"), std::string::npos) << md;
  EXPECT_NE(md.find("| all (197) | 22.6 | 0.206 |"), std::string::npos) << md;
  EXPECT_NE(md.find("| top-k | 23.3 (+3%), k=3 | n/a |"), std::string::npos) << md;
  EXPECT_NE(md.find("RANGE_COLLAPSE"), std::string::npos);
}

}  // namespace
}  // namespace hyperaudit
