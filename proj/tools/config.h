#ifndef HYPERAUDIT_TOOLS_CONFIG_H_
#define HYPERAUDIT_TOOLS_CONFIG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hyperaudit/audit.h"
#include "hyperaudit/dataset.h"
#include "hyperaudit/forest.h"
#include "hyperaudit/synthetic.h"
#include "json.hpp"

namespace hyperaudit::cli {

inline constexpr const char* kConfigVersion = "v1";

enum class DatasetMode { kSynthetic, kLoad };

// Everything a pipeline run depends on. Paths are kept apart from the
// result-relevant settings so the report can embed the latter verbatim.
struct RunConfig {
  std::filesystem::path workdir;
  std::optional<std::uint64_t> seed;

  DatasetMode dataset_mode = DatasetMode::kSynthetic;
  std::filesystem::path dataset_path;  // only for kLoad
  SyntheticConfig synthetic;           // seed is taken from `seed`

  bool spatial = false;

  // Shared forest settings plus partial per-target patches, e.g.
  // {"pH": {"n_trees": 300}}. Seeds are always derived from `seed`.
  ForestParams forest;
  nlohmann::json forest_overrides = nlohmann::json::object();

  double tol = 0.10;
  std::vector<int> ladder;

  int n_bins = 10;
  int top_m = 20;

  RedFlagThresholds thresholds;
  int n_extremes = 3;

  // Throws ValidationError naming the violated constraint.
  void Validate() const;

  std::uint64_t MasterSeed() const;

  // Resolved per-target parameters: shared settings, the target's patch and
  // the derived seed.
  ForestParams ForestFor(Target t) const;

  // Synthetic settings with the master seed filled in.
  SyntheticConfig SyntheticWithSeed() const;

  // Result-relevant settings only (no workdir, no dataset path), in the
  // same shape the config file uses.
  nlohmann::json ToJson() const;
};

RunConfig DefaultConfig();

// Parses a config document strictly. Any unknown key or mistyped value raises
// ValidationError naming the offending key.
RunConfig ConfigFromJson(const nlohmann::json& j);
RunConfig LoadConfig(const std::filesystem::path& path);

// Applies a partial forest patch ({"n_trees": ..}, ..) onto `params`.
void ApplyForestPatch(const nlohmann::json& patch, ForestParams& params);

}  // namespace hyperaudit::cli

#endif  // HYPERAUDIT_TOOLS_CONFIG_H_
