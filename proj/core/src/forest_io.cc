#include "hyperaudit/forest_io.h"

#include "hyperaudit/errors.h"
#include "io_util.h"
#include "json.hpp"

namespace hyperaudit {
using nlohmann::json;

std::string ForestToJson(const Forest& forest) {
  json j;
  j["version"] = "v1";
  j["target"] = forest.target_name;
  j["baseline"] = forest.baseline;
  j["schema_fingerprint"] = forest.schema_fingerprint;
  j["n_features"] = forest.n_features;
  const ForestParams& p = forest.params;
  j["params"] = {{"n_trees", p.n_trees},
                 {"max_depth", p.max_depth},
                 {"min_samples_leaf", p.min_samples_leaf},
                 {"features_per_split", p.features_per_split},
                 {"bootstrap", p.bootstrap},
                 {"seed", p.seed}};
  json trees = json::array();
  for (const Tree& t : forest.trees) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) {
      if (n.IsLeaf()) {
        nodes.push_back({{"cover", n.cover}, {"value", n.value}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"cover", n.cover},
                         {"value", n.value}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

Forest ForestFromJson(const std::string& text) {
  Forest forest;
  try {
    const json j = json::parse(text);
    const std::string version = j.at("version").get<std::string>();
    if (version != "v1") throw ValidationError("unsupported forest version '" + version + "'");
    forest.target_name = j.at("target").get<std::string>();
    forest.baseline = j.at("baseline").get<double>();
    forest.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
    forest.n_features = j.at("n_features").get<std::size_t>();
    const json& p = j.at("params");
    forest.params.n_trees = p.at("n_trees").get<int>();
    forest.params.max_depth = p.at("max_depth").get<int>();
    forest.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    forest.params.features_per_split = p.at("features_per_split").get<double>();
    forest.params.bootstrap = p.at("bootstrap").get<bool>();
    forest.params.seed = p.at("seed").get<std::uint64_t>();
    for (const json& jt : j.at("trees")) {
      Tree tree;
      for (const json& jn : jt.at("nodes")) {
        TreeNode n;
        n.cover = jn.at("cover").get<double>();
        n.value = jn.at("value").get<double>();
        if (jn.contains("feature")) {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
          if (n.feature < 0) throw ValidationError("negative feature id");
        }
        tree.nodes.push_back(n);
      }
      forest.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("forest parse error: ") + e.what());
  }
  forest.Validate();
  if (static_cast<std::size_t>(forest.params.n_trees) != forest.trees.size()) {
    throw ValidationError("params.n_trees does not match tree count");
  }
  return forest;
}

void SaveForest(const Forest& forest, const std::filesystem::path& path) {
  WriteFileBytes(path, ForestToJson(forest));
}

Forest LoadForest(const std::filesystem::path& path) {
  try {
    return ForestFromJson(ReadFileBytes(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace hyperaudit
