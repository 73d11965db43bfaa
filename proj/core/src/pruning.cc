#include "hyperaudit/pruning.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hyperaudit/aggregation.h"
#include "hyperaudit/audit.h"
#include "hyperaudit/hash.h"
#include "hyperaudit/shap.h"
#include "io_util.h"

namespace hyperaudit {
namespace {

std::vector<double> Gather(std::span<const double> y, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const std::size_t r : rows) out.push_back(y[r]);
  return out;
}

void CheckProblem(const PruningProblem& problem) {
  if (problem.y.size() != problem.table.n_samples ||
      problem.split.size() != problem.table.n_samples) {
    throw std::invalid_argument("pruning inputs are not aligned with the table rows");
  }
}

double MaeRatio(double pruned, double baseline) {
  if (baseline == 0.0) return pruned == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return pruned / baseline;
}

}  // namespace

std::vector<int> SelectTopK(std::span<const double> importance, std::size_t k) {
  if (k < 1 || k > importance.size()) throw std::out_of_range("k out of range");
  std::vector<int> order = RankByImportance(importance);
  order.resize(k);
  return order;
}

FeatureTable ProjectColumns(const FeatureTable& table, std::span<const int> ids) {
  FeatureTable out;
  out.schema.axis = table.schema.axis;
  out.schema.spatial_enabled = table.schema.spatial_enabled;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    FeatureEntry e = table.schema.entries.at(ids[i]);
    e.id = static_cast<int>(i);
    out.schema.entries.push_back(e);
  }
  out.n_samples = table.n_samples;
  out.sample_ids = table.sample_ids;
  out.matrix.reserve(table.n_samples * ids.size());
  for (std::size_t r = 0; r < table.n_samples; ++r) {
    for (const int id : ids) out.matrix.push_back(table.At(r, id));
  }
  return out;
}

FullModelFit FitFullModel(const PruningProblem& problem, const ForestParams& params) {
  CheckProblem(problem);
  FullModelFit full;
  for (std::size_t r = 0; r < problem.split.size(); ++r) {
    (problem.split[r] == Split::kTrain ? full.train_rows : full.test_rows).push_back(r);
  }
  if (full.train_rows.empty()) throw std::invalid_argument("empty train split");
  if (full.test_rows.empty()) throw std::invalid_argument("empty test split");

  const FeatureTable train = problem.table.SelectRows(full.train_rows);
  const FeatureTable test = problem.table.SelectRows(full.test_rows);
  const std::vector<double> y_train = Gather(problem.y, full.train_rows);
  const std::vector<double> y_test = Gather(problem.y, full.test_rows);

  full.forest = FitForest(train, y_train, params, problem.target_name);
  full.importance = GlobalImportance(ExplainDataset(full.forest, train));
  full.baseline_mae = Mae(PredictTable(full.forest, test), y_test);
  return full;
}

PruneResult EvaluatePruned(const PruningProblem& problem, const FullModelFit& full, std::size_t k,
                           const ForestParams& params) {
  CheckProblem(problem);
  PruneResult res;
  res.target_name = problem.target_name;
  res.selected_ids = SelectTopK(full.importance, k);
  res.k = k;
  res.full_feature_count = problem.table.n_features();
  res.baseline_mae = full.baseline_mae;
  res.fit_seed = params.seed;
  res.refit_seed = params.seed + kRefitSeedOffset;

  std::string provenance;
  for (const double v : full.importance) provenance += FormatDouble(v) + ',';
  provenance += '|';
  for (const int id : res.selected_ids) provenance += std::to_string(id) + ',';
  res.selection_hash = HexDigest(Fnv1a64(provenance));

  const FeatureTable projected = ProjectColumns(problem.table, res.selected_ids);
  const FeatureTable train = projected.SelectRows(full.train_rows);
  const FeatureTable test = projected.SelectRows(full.test_rows);
  ForestParams refit = params;
  refit.seed = res.refit_seed;
  const Forest pruned = FitForest(train, Gather(problem.y, full.train_rows), refit, problem.target_name);
  res.pruned_mae = Mae(PredictTable(pruned, test), Gather(problem.y, full.test_rows));
  res.ratio = MaeRatio(res.pruned_mae, res.baseline_mae);
  return res;
}

PruneResult PruneAndRetrain(const PruningProblem& problem, std::size_t k, const ForestParams& params) {
  if (k < 1 || k > problem.table.n_features()) throw std::out_of_range("k out of range");
  const FullModelFit full = FitFullModel(problem, params);
  return EvaluatePruned(problem, full, k, params);
}

PruneResult PruneAndRetrain(const Dataset& ds, const FeatureTable& table, Target target,
                            std::size_t k, const ForestParams& params) {
  const std::vector<double> y = ds.TargetColumn(target);
  return PruneAndRetrain(PruningProblem{table, y, ds.split, std::string(TargetName(target))}, k,
                         params);
}

MinimalKResult MinimalK(const PruningProblem& problem, const ForestParams& params, double tol,
                        std::span<const int> ladder) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const FullModelFit full = FitFullModel(problem, params);
  MinimalKResult out;
  const std::size_t n_features = problem.table.n_features();
  for (const int rung : ladder) {
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(rung), n_features);
    if (!out.ladder.empty() && out.ladder.back().k == k) break;
    out.ladder.push_back(EvaluatePruned(problem, full, k, params));
  }
  for (const PruneResult& r : out.ladder) {
    if (r.ratio <= 1.0 + tol) {
      out.k = r.k;
      break;
    }
  }
  return out;
}

MinimalKResult MinimalK(const Dataset& ds, const FeatureTable& table, Target target,
                        const ForestParams& params, double tol, std::span<const int> ladder) {
  const std::vector<double> y = ds.TargetColumn(target);
  return MinimalK(PruningProblem{table, y, ds.split, std::string(TargetName(target))}, params, tol,
                  ladder);
}

std::string FormatPercentDelta(double ratio) {
  if (!std::isfinite(ratio)) return "n/a";
  const long pct = std::lround(100.0 * (ratio - 1.0));
  if (pct == 0) return "0%";
  return (pct > 0 ? "+" : "") + std::to_string(pct) + "%";
}

}  // namespace hyperaudit
