#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.h"
#include "config.h"
#include "hyperaudit/errors.h"
#include "hyperaudit/parallel.h"

namespace {

using hyperaudit::cli::RunConfig;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInvariant = 3;

// Flag values that, when given, win over the config file.
struct Overrides {
  std::string config;
  std::optional<std::string> workdir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dataset;
  std::optional<bool> spatial;
  int threads = 0;

  std::optional<int> n_train, n_test, n_bands, min_side, max_side;
  std::optional<double> noise_sd, outlier_fraction;

  std::optional<int> n_trees, max_depth, min_samples_leaf;
  std::optional<double> features_per_split;
  std::optional<bool> bootstrap;

  std::optional<double> tol;
  std::vector<int> ladder;

  std::optional<int> n_bins, top_m;

  std::optional<double> sd_ratio, coverage, mass, feature_fraction;
  std::optional<int> n_extremes;
};

void AddOptions(CLI::App& app, Overrides& o) {
  app.add_option("-c,--config", o.config, "Config file (JSON, version \"v1\"); flags override it")
      ->check(CLI::ExistingFile)
      ->group("General");
  app.add_option("-w,--workdir", o.workdir, "Directory holding every pipeline artifact")
      ->group("General");
  app.add_option("--seed", o.seed, "Master seed; per-target forest seeds derive from it")
      ->group("General");
  app.add_option("--threads", o.threads,
                 "Maximum worker threads (0 = hardware concurrency); never changes results")
      ->check(CLI::NonNegativeNumber)
      ->group("General");

  app.add_option("--dataset", o.dataset,
                 "Load an existing dataset directory instead of generating synthetic data")
      ->group("Dataset");
  app.add_flag("--spatial,!--no-spatial", o.spatial, "Add spatial feature groups")
      ->group("Dataset");
  app.add_option("--n-train", o.n_train, "Synthetic: number of train patches")->group("Dataset");
  app.add_option("--n-test", o.n_test, "Synthetic: number of test patches")->group("Dataset");
  app.add_option("--n-bands", o.n_bands, "Synthetic: number of spectral bands")->group("Dataset");
  app.add_option("--min-side", o.min_side, "Synthetic: smallest patch side in pixels")
      ->group("Dataset");
  app.add_option("--max-side", o.max_side, "Synthetic: largest patch side in pixels")
      ->group("Dataset");
  app.add_option("--noise-sd", o.noise_sd, "Synthetic: per-pixel reflectance noise sd")
      ->group("Dataset");
  app.add_option("--outlier-fraction", o.outlier_fraction,
                 "Synthetic: share of samples drawn from the inflated tail, in [0, 0.2]")
      ->group("Dataset");

  app.add_option("--n-trees", o.n_trees, "Trees per forest (all targets)")->group("Forest");
  app.add_option("--max-depth", o.max_depth, "Maximum tree depth")->group("Forest");
  app.add_option("--min-samples-leaf", o.min_samples_leaf, "Minimum rows per leaf")
      ->group("Forest");
  app.add_option("--features-per-split", o.features_per_split,
                 "Fraction of features drawn as split candidates, in (0, 1]")
      ->group("Forest");
  app.add_flag("--bootstrap,!--no-bootstrap", o.bootstrap, "Bootstrap rows per tree")
      ->group("Forest");

  app.add_option("--tol", o.tol, "Pruning: accepted relative MAE increase, e.g. 0.10")
      ->group("Pruning");
  app.add_option("--ladder", o.ladder, "Pruning: increasing k values to try, comma separated")
      ->delimiter(',')
      ->group("Pruning");

  app.add_option("--n-bins", o.n_bins, "Aggregation: wavelength bins in the heatmap")
      ->group("Aggregation");
  app.add_option("--top-m", o.top_m, "Aggregation: features in the beeswarm data")
      ->group("Aggregation");

  app.add_option("--sd-ratio-threshold", o.sd_ratio,
                 "Audit: range collapse when pred sd / truth sd falls below this")
      ->group("Audit");
  app.add_option("--coverage-threshold", o.coverage,
                 "Audit: ... and the central coverage exceeds this")
      ->group("Audit");
  app.add_option("--mass-threshold", o.mass,
                 "Audit: importance share checked for concentration")
      ->group("Audit");
  app.add_option("--feature-fraction-threshold", o.feature_fraction,
                 "Audit: concentration when that share sits in at most this fraction of features")
      ->group("Audit");
  app.add_option("--n-extremes", o.n_extremes,
                 "Audit: cases per list (over-, underestimated, best)")
      ->group("Audit");
}

RunConfig Resolve(const Overrides& o) {
  using hyperaudit::cli::DatasetMode;
  RunConfig cfg = o.config.empty() ? hyperaudit::cli::DefaultConfig()
                                   : hyperaudit::cli::LoadConfig(o.config);
  if (o.workdir) cfg.workdir = *o.workdir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.dataset) {
    cfg.dataset_mode = DatasetMode::kLoad;
    cfg.dataset_path = *o.dataset;
  }
  if (o.spatial) cfg.spatial = *o.spatial;

  auto& s = cfg.synthetic;
  if (o.n_train) s.n_train = *o.n_train;
  if (o.n_test) s.n_test = *o.n_test;
  if (o.n_bands) s.axis.n_bands = *o.n_bands;
  if (o.min_side) s.min_side = *o.min_side;
  if (o.max_side) s.max_side = *o.max_side;
  if (o.noise_sd) s.noise_sd = *o.noise_sd;
  if (o.outlier_fraction) s.outlier_fraction = *o.outlier_fraction;

  // Forest flags apply to every target, so they also beat per-target
  // patches from the config file.
  nlohmann::json patch = nlohmann::json::object();
  if (o.n_trees) patch["n_trees"] = *o.n_trees;
  if (o.max_depth) patch["max_depth"] = *o.max_depth;
  if (o.min_samples_leaf) patch["min_samples_leaf"] = *o.min_samples_leaf;
  if (o.features_per_split) patch["features_per_split"] = *o.features_per_split;
  if (o.bootstrap) patch["bootstrap"] = *o.bootstrap;
  hyperaudit::cli::ApplyForestPatch(patch, cfg.forest);
  for (auto& [target, target_patch] : cfg.forest_overrides.items()) {
    for (const auto& [key, value] : patch.items()) target_patch.erase(key);
  }

  if (o.tol) cfg.tol = *o.tol;
  if (!o.ladder.empty()) cfg.ladder = o.ladder;
  if (o.n_bins) cfg.n_bins = *o.n_bins;
  if (o.top_m) cfg.top_m = *o.top_m;
  if (o.sd_ratio) cfg.thresholds.sd_ratio = *o.sd_ratio;
  if (o.coverage) cfg.thresholds.coverage = *o.coverage;
  if (o.mass) cfg.thresholds.mass = *o.mass;
  if (o.feature_fraction) cfg.thresholds.feature_fraction = *o.feature_fraction;
  if (o.n_extremes) cfg.n_extremes = *o.n_extremes;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hyperaudit: train, explain, aggregate, prune and audit per-target soil regressors on "
      "hyperspectral patches.\nEvery subcommand reads and writes artifacts inside --workdir."};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Overrides overrides;
  AddOptions(app, overrides);

  std::function<void(const RunConfig&)> action;
  const auto add = [&](const char* name, const char* help, void (*fn)(const RunConfig&)) {
    app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
  };
  add("gen-data", "Generate the synthetic dataset (or copy --dataset) into workdir/data",
      hyperaudit::cli::GenData);
  add("extract", "Extract the feature table into workdir/features", hyperaudit::cli::Extract);
  add("train", "Fit one forest per target into workdir/models", hyperaudit::cli::Train);
  add("explain", "Shapley values for the test split into workdir/shap", hyperaudit::cli::Explain);
  add("aggregate", "Importance, group, heatmap and plot tables into workdir/aggregate",
      hyperaudit::cli::Aggregate);
  add("prune", "Minimal-k pruning search into workdir/prune", hyperaudit::cli::Prune);
  add("audit", "Residual summaries, red flags and extreme cases into workdir/audit",
      hyperaudit::cli::Audit);
  add("report", "Merge results into workdir/report.json and report.md", hyperaudit::cli::Report);
  add("run", "Every stage from gen-data through report", hyperaudit::cli::RunAll);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (overrides.threads > 0) hyperaudit::SetMaxThreads(overrides.threads);
    action(Resolve(overrides));
    return 0;
  } catch (const hyperaudit::ValidationError& e) {
    std::cerr << "hyperaudit: validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "hyperaudit: validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "hyperaudit: validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "hyperaudit: validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const hyperaudit::InvariantError& e) {
    std::cerr << "hyperaudit: invariant breach: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "hyperaudit: internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
}
