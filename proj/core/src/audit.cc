#include "hyperaudit/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hyperaudit/aggregation.h"
#include "hyperaudit/stats.h"

namespace hyperaudit {
namespace {

constexpr std::size_t kTopFeaturesPerCase = 5;

std::vector<FeatureContribution> TopContributions(const ShapMatrix& sm, std::size_t row) {
  std::vector<int> ids(sm.n_features);
  std::iota(ids.begin(), ids.end(), 0);
  const auto phi = sm.Row(row);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](int a, int b) { return std::abs(phi[a]) > std::abs(phi[b]); });
  ids.resize(std::min(kTopFeaturesPerCase, ids.size()));
  std::vector<FeatureContribution> out;
  for (const int id : ids) out.push_back({id, phi[id]});
  return out;
}

}  // namespace

double Mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("mae: inputs must be non-empty and of equal length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

ResidualSummary SummarizeResiduals(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("residuals: length mismatch");
  if (pred.size() < 10) throw std::invalid_argument("residual summary needs at least 10 samples");

  ResidualSummary rs;
  rs.pred.assign(pred.begin(), pred.end());
  rs.truth.assign(truth.begin(), truth.end());
  rs.residuals.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) rs.residuals[i] = pred[i] - truth[i];

  rs.mean = Mean(rs.residuals);
  rs.sd = PopulationSd(rs.residuals);
  rs.q25 = Quantile(rs.residuals, 0.25);
  rs.q50 = Quantile(rs.residuals, 0.50);
  rs.q75 = Quantile(rs.residuals, 0.75);

  const auto [lo_it, hi_it] = std::minmax_element(rs.residuals.begin(), rs.residuals.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = (hi - lo) / kResidualHistogramBins;
  for (int i = 0; i <= kResidualHistogramBins; ++i) {
    rs.hist_edges[i] = i == kResidualHistogramBins ? hi : lo + i * width;
  }
  for (const double r : rs.residuals) {
    int bin = width > 0.0 ? static_cast<int>((r - lo) / width) : 0;
    bin = std::clamp(bin, 0, kResidualHistogramBins - 1);
    ++rs.hist_counts[bin];
  }

  rs.pred_sd = PopulationSd(pred);
  rs.truth_sd = PopulationSd(truth);
  if (rs.truth_sd == 0.0) {
    rs.sd_ratio = rs.pred_sd == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  } else {
    rs.sd_ratio = rs.pred_sd / rs.truth_sd;
  }

  rs.truth_q10 = Quantile(truth, 0.10);
  rs.truth_q90 = Quantile(truth, 0.90);
  std::size_t inside = 0;
  for (const double p : pred) inside += (p >= rs.truth_q10 && p <= rs.truth_q90);
  rs.central_coverage = static_cast<double>(inside) / static_cast<double>(pred.size());
  return rs;
}

std::string_view RedFlagName(RedFlag flag) {
  return flag == RedFlag::kRangeCollapse ? "RANGE_COLLAPSE" : "CONCENTRATED_IMPORTANCE";
}

void RedFlagThresholds::Validate() const {
  for (const double v : {sd_ratio, coverage, mass, feature_fraction}) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("red-flag thresholds must lie in (0, 1)");
  }
}

bool RedFlagReport::Has(RedFlag f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::size_t ConcentrationSubsetSize(std::span<const double> importance, double mass) {
  double total = 0.0;
  for (const double v : importance) total += v;
  if (total <= 0.0) return 0;
  const std::vector<int> order = RankByImportance(importance);
  double acc = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    acc += importance[order[i]];
    if (acc >= mass * total) return i + 1;
  }
  return order.size();
}

RedFlagReport DetectRedFlags(const ResidualSummary& rs, std::span<const double> importance,
                             const RedFlagThresholds& thresholds) {
  thresholds.Validate();
  RedFlagReport report;

  report.evidence["sd_ratio"] = rs.sd_ratio;
  report.evidence["sd_ratio_threshold"] = thresholds.sd_ratio;
  report.evidence["central_coverage"] = rs.central_coverage;
  report.evidence["coverage_threshold"] = thresholds.coverage;
  if (rs.sd_ratio < thresholds.sd_ratio && rs.central_coverage > thresholds.coverage) {
    report.flags.push_back(RedFlag::kRangeCollapse);
  }

  double total = 0.0;
  for (const double v : importance) {
    if (!(v >= 0.0)) throw std::invalid_argument("importance values must be non-negative");
    total += v;
  }
  const double n_features = static_cast<double>(importance.size());
  report.evidence["total_importance"] = total;
  report.evidence["n_features"] = n_features;
  report.evidence["mass_threshold"] = thresholds.mass;
  report.evidence["feature_fraction_threshold"] = thresholds.feature_fraction;
  report.evidence["feature_cutoff"] = thresholds.feature_fraction * n_features;
  if (total <= 0.0) {
    report.notes.push_back("total importance is zero; concentration check skipped");
  } else {
    const std::size_t subset = ConcentrationSubsetSize(importance, thresholds.mass);
    report.evidence["concentration_subset_size"] = static_cast<double>(subset);
    report.evidence["concentration_subset_fraction"] = static_cast<double>(subset) / n_features;
    if (static_cast<double>(subset) <= thresholds.feature_fraction * n_features) {
      report.flags.push_back(RedFlag::kConcentratedImportance);
    }
  }
  return report;
}

ExtremeCases ExplainExtremes(const ShapMatrix& sm, std::span<const double> pred,
                             std::span<const double> truth, std::size_t n_cases) {
  const std::size_t n = sm.n_samples;
  if (pred.size() != n || truth.size() != n) {
    throw std::invalid_argument("extremes: predictions, truth and shap rows must align");
  }
  if (n_cases < 1 || 3 * n_cases > n) {
    throw std::invalid_argument("extremes: need 1 <= n_cases and 3 * n_cases <= n_samples");
  }
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = pred[i] - truth[i];

  std::vector<std::uint8_t> taken(n, 0);
  auto pick = [&](auto better) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(), better);
    candidates.resize(n_cases);
    std::vector<ExtremeCase> cases;
    for (const std::size_t i : candidates) {
      taken[i] = 1;
      cases.push_back({sm.sample_ids[i], residual[i], TopContributions(sm, i)});
    }
    return cases;
  };

  ExtremeCases out;
  out.overestimated = pick([&](std::size_t a, std::size_t b) { return residual[a] > residual[b]; });
  out.underestimated = pick([&](std::size_t a, std::size_t b) { return residual[a] < residual[b]; });
  out.best = pick([&](std::size_t a, std::size_t b) {
    return std::abs(residual[a]) < std::abs(residual[b]);
  });
  return out;
}

}  // namespace hyperaudit
