#include "hyperaudit/pruning_io.h"

#include <cmath>

#include "io_util.h"
#include "json.hpp"

namespace hyperaudit {
using nlohmann::json;
namespace {

json Num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json PointJson(const PruneResult& r) {
  return {{"k", r.k},
          {"pruned_mae", Num(r.pruned_mae)},
          {"ratio", Num(r.ratio)},
          {"percent_delta", FormatPercentDelta(r.ratio)},
          {"selected_ids", r.selected_ids},
          {"refit_seed", r.refit_seed},
          {"selection_hash", r.selection_hash}};
}

}  // namespace

std::string PruneReportJson(const std::vector<PruneTargetReport>& targets, double tol) {
  json rows = json::array();
  for (const PruneTargetReport& t : targets) {
    json row;
    row["target"] = t.target;
    if (t.result.ladder.empty()) {
      throw std::invalid_argument("prune report: target " + t.target + " has no ladder points");
    }
    const PruneResult& first = t.result.ladder.front();
    row["full_feature_count"] = first.full_feature_count;
    row["full_mae"] = Num(first.baseline_mae);
    row["fit_seed"] = first.fit_seed;
    const PruneResult* chosen = nullptr;
    for (const PruneResult& r : t.result.ladder) {
      if (t.result.k && r.k == *t.result.k) chosen = &r;
    }
    if (chosen != nullptr) {
      row["k"] = chosen->k;
      row["pruned_mae"] = Num(chosen->pruned_mae);
      row["ratio"] = Num(chosen->ratio);
      row["percent_delta"] = FormatPercentDelta(chosen->ratio);
      row["selected_ids"] = chosen->selected_ids;
    } else {
      row["k"] = nullptr;
      row["pruned_mae"] = nullptr;
      row["ratio"] = nullptr;
      row["percent_delta"] = "n/a";
      row["selected_ids"] = json::array();
    }
    json ladder = json::array();
    for (const PruneResult& r : t.result.ladder) ladder.push_back(PointJson(r));
    row["ladder"] = std::move(ladder);
    rows.push_back(std::move(row));
  }
  json j;
  j["version"] = "v1";
  j["tol"] = tol;
  j["targets"] = std::move(rows);
  return j.dump(2) + "\n";
}

void WritePruneReport(const std::vector<PruneTargetReport>& targets, double tol,
                      const std::filesystem::path& path) {
  WriteFileBytes(path, PruneReportJson(targets, tol));
}

}  // namespace hyperaudit
