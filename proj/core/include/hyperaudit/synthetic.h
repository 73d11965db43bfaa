#ifndef HYPERAUDIT_SYNTHETIC_H_
#define HYPERAUDIT_SYNTHETIC_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hyperaudit/dataset.h"

namespace hyperaudit {

// Marginal of one soil parameter. P, K and Mg are log-normal (mu/sigma on the
// log scale); pH is a normal truncated to [3, 10].
struct TargetDistribution {
  double center = 0.0;
  double spread = 1.0;
};

// Generator settings. Defaults describe the standard desk-scale dataset: 200
// train and 80 test patches over 50 bands spanning 462.08-938.37 nm, patch
// sides uniform in [8, 48] (roughly 37% of patches end up at most 32x32).
struct SyntheticConfig {
  int n_train = 200;
  int n_test = 80;
  BandAxis axis{50, 462.080, 938.370};
  // Band indices carrying an absorption dip for P, K, Mg, pH (1-3 each).
  std::array<std::vector<int>, 4> planted_bands{{{8}, {20}, {32}, {42}}};
  int min_side = 8;
  int max_side = 48;
  double noise_sd = 0.01;
  double outlier_fraction = 0.05;
  std::uint64_t seed = 0;

  // Plausibility defaults, not calibrated against any field campaign.
  std::array<TargetDistribution, 4> marginals{{
      {4.25, 0.40},  // P:  median ~70 mg/kg
      {5.40, 0.35},  // K:  median ~220 mg/kg
      {5.08, 0.30},  // Mg: median ~160 mg/kg
      {6.80, 0.45},  // pH
  }};
  // Gaussian dip half-width in bands; dips are truncated at 3 widths.
  double dip_width_bands = 1.0;
  double dip_depth_min = 0.02;
  double dip_depth_max = 0.22;
  // Outliers draw their latent score with this many times the base spread.
  double outlier_spread_factor = 3.0;

  // Throws std::invalid_argument on any violated constraint.
  void Validate() const;
  // Canonical text form, hashed into Dataset::provenance.
  std::string Canonical() const;
};

// Deterministic in cfg (including seed). Samples 0..n_train-1 are train,
// the rest test. Each masked pixel spectrum is a smooth base curve minus
// truncated Gaussian dips at the planted bands; dip depth increases strictly
// with the corresponding target value.
Dataset GenerateSynthetic(const SyntheticConfig& cfg);

// Noise-free masked-pixel spectrum the generator uses for a sample with the
// given targets; exposed for tests.
std::vector<double> CleanSpectrum(const SyntheticConfig& cfg, const SoilTargets& targets);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_SYNTHETIC_H_
