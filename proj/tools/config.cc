#include "config.h"

#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <string_view>

#include "hyperaudit/errors.h"
#include "hyperaudit/pruning.h"

namespace hyperaudit::cli {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw ValidationError("config: " + where + ": " + what);
}

void CheckObject(const json& j, const std::string& where) {
  if (!j.is_object()) Fail(where, "must be an object");
}

void CheckKeys(const json& j, std::initializer_list<std::string_view> allowed,
               const std::string& where) {
  CheckObject(j, where);
  const std::set<std::string_view> ok(allowed);
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) Fail(where, "unknown key '" + key + "'");
  }
}

std::string Path(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

void ReadInt(const json& j, const char* key, int& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number_integer()) Fail(Path(where, key), "must be an integer");
  const auto wide = v.get<std::int64_t>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    Fail(Path(where, key), "out of range");
  }
  out = static_cast<int>(wide);
}

void ReadDouble(const json& j, const char* key, double& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number()) Fail(Path(where, key), "must be a number");
  out = v.get<double>();
}

void ReadBool(const json& j, const char* key, bool& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_boolean()) Fail(Path(where, key), "must be true or false");
  out = v.get<bool>();
}

std::vector<int> ReadIntList(const json& v, const std::string& where) {
  if (!v.is_array()) Fail(where, "must be an array of integers");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) Fail(where, "must be an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

void ReadSynthetic(const json& j, SyntheticConfig& cfg) {
  const std::string where = "dataset.synthetic";
  CheckKeys(j,
            {"n_train", "n_test", "n_bands", "lambda_min_nm", "lambda_max_nm", "planted_bands",
             "min_side", "max_side", "noise_sd", "outlier_fraction", "dip_width_bands",
             "dip_depth_min", "dip_depth_max", "outlier_spread_factor"},
            where);
  ReadInt(j, "n_train", cfg.n_train, where);
  ReadInt(j, "n_test", cfg.n_test, where);
  ReadInt(j, "n_bands", cfg.axis.n_bands, where);
  ReadDouble(j, "lambda_min_nm", cfg.axis.lambda_min_nm, where);
  ReadDouble(j, "lambda_max_nm", cfg.axis.lambda_max_nm, where);
  ReadInt(j, "min_side", cfg.min_side, where);
  ReadInt(j, "max_side", cfg.max_side, where);
  ReadDouble(j, "noise_sd", cfg.noise_sd, where);
  ReadDouble(j, "outlier_fraction", cfg.outlier_fraction, where);
  ReadDouble(j, "dip_width_bands", cfg.dip_width_bands, where);
  ReadDouble(j, "dip_depth_min", cfg.dip_depth_min, where);
  ReadDouble(j, "dip_depth_max", cfg.dip_depth_max, where);
  ReadDouble(j, "outlier_spread_factor", cfg.outlier_spread_factor, where);
  if (j.contains("planted_bands")) {
    const json& pb = j.at("planted_bands");
    const std::string pb_where = where + ".planted_bands";
    if (!pb.is_array() || pb.size() != 4) Fail(pb_where, "must list band indices for P, K, Mg, pH");
    for (std::size_t t = 0; t < 4; ++t) cfg.planted_bands[t] = ReadIntList(pb[t], pb_where);
  }
}

json ForestToPatch(const ForestParams& p) {
  return {{"n_trees", p.n_trees},
          {"max_depth", p.max_depth},
          {"min_samples_leaf", p.min_samples_leaf},
          {"features_per_split", p.features_per_split},
          {"bootstrap", p.bootstrap}};
}

}  // namespace

void ApplyForestPatch(const json& patch, ForestParams& params) {
  const std::string where = "forest";
  CheckKeys(patch, {"n_trees", "max_depth", "min_samples_leaf", "features_per_split", "bootstrap"},
            where);
  ReadInt(patch, "n_trees", params.n_trees, where);
  ReadInt(patch, "max_depth", params.max_depth, where);
  ReadInt(patch, "min_samples_leaf", params.min_samples_leaf, where);
  ReadDouble(patch, "features_per_split", params.features_per_split, where);
  ReadBool(patch, "bootstrap", params.bootstrap, where);
}

RunConfig DefaultConfig() {
  RunConfig cfg;
  cfg.ladder.assign(kPruneLadder.begin(), kPruneLadder.end());
  return cfg;
}

void RunConfig::Validate() const {
  if (!seed) throw ValidationError("config: seed is required (set \"seed\" or pass --seed)");
  if (workdir.empty()) throw ValidationError("config: workdir is required (pass --workdir)");
  if (dataset_mode == DatasetMode::kLoad && dataset_path.empty()) {
    throw ValidationError("config: dataset.path is required when dataset.mode is \"load\"");
  }
  try {
    if (dataset_mode == DatasetMode::kSynthetic) synthetic.Validate();
  } catch (const std::invalid_argument& e) {
    Fail("dataset.synthetic", e.what());
  }
  for (const Target t : kAllTargets) {
    try {
      ForestFor(t).Validate();
    } catch (const std::invalid_argument& e) {
      Fail("forest (" + std::string(TargetName(t)) + ")", e.what());
    }
  }
  if (!(tol > 0.0)) Fail("prune.tol", "must be > 0");
  if (ladder.empty()) Fail("prune.ladder", "must not be empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) Fail("prune.ladder", "entries must be >= 1");
    if (i > 0 && ladder[i] <= ladder[i - 1]) Fail("prune.ladder", "must be strictly increasing");
  }
  if (n_bins < 1) Fail("aggregate.n_bins", "must be >= 1");
  if (top_m < 1) Fail("aggregate.top_m", "must be >= 1");
  try {
    thresholds.Validate();
  } catch (const std::invalid_argument& e) {
    Fail("audit", e.what());
  }
  if (n_extremes < 1) Fail("audit.n_extremes", "must be >= 1");
}

std::uint64_t RunConfig::MasterSeed() const {
  if (!seed) throw ValidationError("config: seed is required (set \"seed\" or pass --seed)");
  return *seed;
}

ForestParams RunConfig::ForestFor(Target t) const {
  ForestParams p = forest;
  const std::string name(TargetName(t));
  if (forest_overrides.contains(name)) ApplyForestPatch(forest_overrides.at(name), p);
  p.seed = TargetSeed(MasterSeed(), t);
  return p;
}

SyntheticConfig RunConfig::SyntheticWithSeed() const {
  SyntheticConfig s = synthetic;
  s.seed = MasterSeed();
  return s;
}

json RunConfig::ToJson() const {
  json j;
  j["version"] = kConfigVersion;
  j["seed"] = MasterSeed();
  json ds;
  ds["mode"] = dataset_mode == DatasetMode::kSynthetic ? "synthetic" : "load";
  if (dataset_mode == DatasetMode::kSynthetic) {
    json planted = json::array();
    for (const auto& bands : synthetic.planted_bands) planted.push_back(bands);
    ds["synthetic"] = {{"n_train", synthetic.n_train},
                       {"n_test", synthetic.n_test},
                       {"n_bands", synthetic.axis.n_bands},
                       {"lambda_min_nm", synthetic.axis.lambda_min_nm},
                       {"lambda_max_nm", synthetic.axis.lambda_max_nm},
                       {"planted_bands", planted},
                       {"min_side", synthetic.min_side},
                       {"max_side", synthetic.max_side},
                       {"noise_sd", synthetic.noise_sd},
                       {"outlier_fraction", synthetic.outlier_fraction},
                       {"dip_width_bands", synthetic.dip_width_bands},
                       {"dip_depth_min", synthetic.dip_depth_min},
                       {"dip_depth_max", synthetic.dip_depth_max},
                       {"outlier_spread_factor", synthetic.outlier_spread_factor}};
  }
  j["dataset"] = ds;
  j["spatial"] = spatial;
  j["forest"] = ForestToPatch(forest);
  j["forest_overrides"] = forest_overrides;
  j["prune"] = {{"tol", tol}, {"ladder", ladder}};
  j["aggregate"] = {{"n_bins", n_bins}, {"top_m", top_m}};
  j["audit"] = {{"sd_ratio", thresholds.sd_ratio},
                {"coverage", thresholds.coverage},
                {"mass", thresholds.mass},
                {"feature_fraction", thresholds.feature_fraction},
                {"n_extremes", n_extremes}};
  return j;
}

RunConfig ConfigFromJson(const json& j) {
  RunConfig cfg = DefaultConfig();
  CheckKeys(j,
            {"version", "seed", "workdir", "dataset", "spatial", "forest", "forest_overrides",
             "prune", "aggregate", "audit"},
            "top level");
  if (!j.contains("version") || !j.at("version").is_string()) Fail("version", "missing");
  if (j.at("version").get<std::string>() != kConfigVersion) {
    Fail("version", "unsupported version '" + j.at("version").get<std::string>() + "'");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) Fail("seed", "must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("workdir")) {
    if (!j.at("workdir").is_string()) Fail("workdir", "must be a string");
    cfg.workdir = j.at("workdir").get<std::string>();
  }
  if (j.contains("dataset")) {
    const json& ds = j.at("dataset");
    CheckKeys(ds, {"mode", "path", "synthetic"}, "dataset");
    if (ds.contains("mode")) {
      const json& mode = ds.at("mode");
      if (mode == "synthetic") {
        cfg.dataset_mode = DatasetMode::kSynthetic;
      } else if (mode == "load") {
        cfg.dataset_mode = DatasetMode::kLoad;
      } else {
        Fail("dataset.mode", "must be \"synthetic\" or \"load\"");
      }
    }
    if (ds.contains("path")) {
      if (!ds.at("path").is_string()) Fail("dataset.path", "must be a string");
      cfg.dataset_path = ds.at("path").get<std::string>();
    }
    if (ds.contains("synthetic")) ReadSynthetic(ds.at("synthetic"), cfg.synthetic);
  }
  ReadBool(j, "spatial", cfg.spatial, "");
  if (j.contains("forest")) ApplyForestPatch(j.at("forest"), cfg.forest);
  if (j.contains("forest_overrides")) {
    const json& ov = j.at("forest_overrides");
    CheckKeys(ov, {"P", "K", "Mg", "pH"}, "forest_overrides");
    for (const auto& [name, patch] : ov.items()) {
      ForestParams probe;
      ApplyForestPatch(patch, probe);
    }
    cfg.forest_overrides = ov;
  }
  if (j.contains("prune")) {
    const json& pr = j.at("prune");
    CheckKeys(pr, {"tol", "ladder"}, "prune");
    ReadDouble(pr, "tol", cfg.tol, "prune");
    if (pr.contains("ladder")) cfg.ladder = ReadIntList(pr.at("ladder"), "prune.ladder");
  }
  if (j.contains("aggregate")) {
    const json& ag = j.at("aggregate");
    CheckKeys(ag, {"n_bins", "top_m"}, "aggregate");
    ReadInt(ag, "n_bins", cfg.n_bins, "aggregate");
    ReadInt(ag, "top_m", cfg.top_m, "aggregate");
  }
  if (j.contains("audit")) {
    const json& au = j.at("audit");
    CheckKeys(au, {"sd_ratio", "coverage", "mass", "feature_fraction", "n_extremes"}, "audit");
    ReadDouble(au, "sd_ratio", cfg.thresholds.sd_ratio, "audit");
    ReadDouble(au, "coverage", cfg.thresholds.coverage, "audit");
    ReadDouble(au, "mass", cfg.thresholds.mass, "audit");
    ReadDouble(au, "feature_fraction", cfg.thresholds.feature_fraction, "audit");
    ReadInt(au, "n_extremes", cfg.n_extremes, "audit");
  }
  return cfg;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    return ConfigFromJson(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace hyperaudit::cli
