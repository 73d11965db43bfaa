#ifndef HYPERAUDIT_STATS_H_
#define HYPERAUDIT_STATS_H_

#include <span>
#include <vector>

namespace hyperaudit {

double Mean(std::span<const double> values);

// Population (divide-by-n) standard deviation.
double PopulationSd(std::span<const double> values);

// Linear interpolation between order statistics: position (n-1)*q in the
// sorted sample. q must lie in [0, 1] and values must be non-empty.
double Quantile(std::span<const double> values, double q);

// 0-based ranks with ties assigned the average of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of average ranks. Returns 0 when either side is
// constant.
double SpearmanCorrelation(std::span<const double> a, std::span<const double> b);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_STATS_H_
