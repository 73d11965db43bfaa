#ifndef HYPERAUDIT_AUDIT_H_
#define HYPERAUDIT_AUDIT_H_

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hyperaudit/shap.h"

namespace hyperaudit {

// Mean absolute error. Throws std::invalid_argument on empty or mismatched
// inputs.
double Mae(std::span<const double> pred, std::span<const double> truth);

inline constexpr int kResidualHistogramBins = 20;

struct ResidualSummary {
  std::vector<double> residuals;  // pred - truth
  std::vector<double> truth;
  std::vector<double> pred;
  double mean = 0.0;
  double sd = 0.0;  // population
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  // 20 equal-width bins over [min, max] of the residuals; the maximum lands
  // in the last bin. A zero-width range puts everything in bin 0.
  std::array<double, kResidualHistogramBins + 1> hist_edges{};
  std::array<std::size_t, kResidualHistogramBins> hist_counts{};
  double pred_sd = 0.0;
  double truth_sd = 0.0;
  // pred_sd / truth_sd; 1 when both are 0, +inf when only truth_sd is 0.
  double sd_ratio = 0.0;
  // Fraction of predictions inside [q10(truth), q90(truth)], inclusive.
  double central_coverage = 0.0;
  double truth_q10 = 0.0;
  double truth_q90 = 0.0;
};

// Requires at least 10 samples (std::invalid_argument otherwise).
ResidualSummary SummarizeResiduals(std::span<const double> pred, std::span<const double> truth);

enum class RedFlag { kRangeCollapse, kConcentratedImportance };

std::string_view RedFlagName(RedFlag flag);

struct RedFlagThresholds {
  double sd_ratio = 0.5;         // range collapse: pred_sd / truth_sd below this
  double coverage = 0.9;         // ... and central coverage above this
  double mass = 0.5;             // concentration: share of total importance
  double feature_fraction = 0.01;  // ... carried by at most this share of features

  // Throws std::invalid_argument if any threshold is outside (0, 1).
  void Validate() const;
};

struct RedFlagReport {
  std::vector<RedFlag> flags;
  // Metrics and thresholds behind each check, raised or not.
  std::map<std::string, double> evidence;
  std::vector<std::string> notes;

  bool Has(RedFlag f) const;
};

// Smallest number of features whose importance sums to at least
// `mass` * total (greedy by descending importance). 0 when total is 0.
std::size_t ConcentrationSubsetSize(std::span<const double> importance, double mass);

RedFlagReport DetectRedFlags(const ResidualSummary& rs, std::span<const double> importance,
                             const RedFlagThresholds& thresholds = {});

struct FeatureContribution {
  int feature_id;
  double shap_value;
};

struct ExtremeCase {
  int sample_id;
  double residual;
  std::vector<FeatureContribution> top_features;  // up to 5, by |phi| desc
};

struct ExtremeCases {
  std::vector<ExtremeCase> overestimated;   // largest positive residuals
  std::vector<ExtremeCase> underestimated;  // most negative residuals
  std::vector<ExtremeCase> best;            // smallest |residual|
};

// Picks the over-, then under-estimated, then best cases; each later list
// draws only from samples not already picked, so the lists are disjoint.
// Requires 1 <= n_cases and 3 * n_cases <= n_samples.
ExtremeCases ExplainExtremes(const ShapMatrix& sm, std::span<const double> pred,
                             std::span<const double> truth, std::size_t n_cases);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_AUDIT_H_
