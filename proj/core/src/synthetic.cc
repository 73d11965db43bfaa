#include "hyperaudit/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hyperaudit/hash.h"
#include "hyperaudit/random.h"

namespace hyperaudit {
namespace {

constexpr double kPhMin = 3.0;
constexpr double kPhMax = 10.0;

double BaseCurve(int band, int n_bands) {
  const double t = static_cast<double>(band) / (n_bands - 1);
  return 0.35 + 0.25 * t + 0.04 * std::sin(3.0 * std::numbers::pi * t);
}

double Logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Latent standardized score of a target value under its marginal.
double LatentScore(const SyntheticConfig& cfg, Target t, double value) {
  const auto& d = cfg.marginals[static_cast<int>(t)];
  const double g = t == Target::kPh ? value : std::log(value);
  return (g - d.center) / d.spread;
}

double DipDepth(const SyntheticConfig& cfg, Target t, double value) {
  const double z = LatentScore(cfg, t, value);
  return cfg.dip_depth_min + (cfg.dip_depth_max - cfg.dip_depth_min) * Logistic(0.5 * z);
}

SoilTargets DrawTargets(const SyntheticConfig& cfg, Rng& rng) {
  const bool outlier = rng.Uniform() < cfg.outlier_fraction;
  const double inflate = outlier ? cfg.outlier_spread_factor : 1.0;
  SoilTargets st;
  for (const Target t : {Target::kP, Target::kK, Target::kMg}) {
    const auto& d = cfg.marginals[static_cast<int>(t)];
    double z = rng.Normal() * inflate;
    // Right-skewed tail: outliers only land above the bulk.
    if (outlier) z = std::abs(z);
    st.Get(t) = std::exp(d.center + d.spread * z);
  }
  const auto& ph = cfg.marginals[static_cast<int>(Target::kPh)];
  double value;
  do {
    value = ph.center + ph.spread * inflate * rng.Normal();
  } while (value < kPhMin || value > kPhMax);
  st.ph = value;
  return st;
}

}  // namespace

void SyntheticConfig::Validate() const {
  axis.Validate();
  if (n_train < 1 || n_test < 1) throw std::invalid_argument("n_train and n_test must be >= 1");
  for (int t = 0; t < 4; ++t) {
    const auto& bands = planted_bands[t];
    if (bands.empty() || bands.size() > 3) {
      throw std::invalid_argument("each target needs 1-3 planted bands");
    }
    for (const int b : bands) {
      if (b < 0 || b >= axis.n_bands) throw std::invalid_argument("planted band out of range");
    }
  }
  if (min_side < 4) throw std::invalid_argument("min_side must be >= 4");
  if (min_side > max_side) throw std::invalid_argument("degenerate patch size range: min_side > max_side");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise_sd must be >= 0");
  if (!(outlier_fraction >= 0.0 && outlier_fraction <= 0.2)) {
    throw std::invalid_argument("outlier_fraction must lie in [0, 0.2]");
  }
  if (!(dip_width_bands > 0.0)) throw std::invalid_argument("dip_width_bands must be > 0");
  if (!(dip_depth_min >= 0.0 && dip_depth_min < dip_depth_max)) {
    throw std::invalid_argument("dip depths must satisfy 0 <= min < max");
  }
  for (const auto& m : marginals) {
    if (!(m.spread > 0.0)) throw std::invalid_argument("marginal spread must be > 0");
  }
}

std::string SyntheticConfig::Canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "synthetic-v1;n_train=" << n_train << ";n_test=" << n_test
     << ";axis=" << axis.n_bands << ',' << axis.lambda_min_nm << ',' << axis.lambda_max_nm
     << ";planted=";
  for (const auto& bands : planted_bands) {
    for (const int b : bands) os << b << ',';
    os << '/';
  }
  os << ";sides=" << min_side << ',' << max_side << ";noise=" << noise_sd
     << ";outliers=" << outlier_fraction << ";seed=" << seed << ";marginals=";
  for (const auto& m : marginals) os << m.center << ',' << m.spread << '/';
  os << ";dip=" << dip_width_bands << ',' << dip_depth_min << ',' << dip_depth_max
     << ";outlier_spread=" << outlier_spread_factor;
  return os.str();
}

std::vector<double> CleanSpectrum(const SyntheticConfig& cfg, const SoilTargets& targets) {
  const int n = cfg.axis.n_bands;
  std::vector<double> spectrum(n);
  for (int b = 0; b < n; ++b) spectrum[b] = BaseCurve(b, n);
  const double w = cfg.dip_width_bands;
  for (const Target t : kAllTargets) {
    const double depth = DipDepth(cfg, t, targets.Get(t));
    for (const int center : cfg.planted_bands[static_cast<int>(t)]) {
      for (int b = 0; b < n; ++b) {
        const double d = (b - center) / w;
        if (std::abs(d) <= 3.0) spectrum[b] -= depth * std::exp(-0.5 * d * d);
      }
    }
  }
  for (double& v : spectrum) v = std::max(v, 0.0);
  return spectrum;
}

Dataset GenerateSynthetic(const SyntheticConfig& cfg) {
  cfg.Validate();
  const int n_total = cfg.n_train + cfg.n_test;
  const int n_bands = cfg.axis.n_bands;

  Dataset ds;
  ds.axis = cfg.axis;
  ds.provenance = "synthetic:" + HexDigest(Fnv1a64(cfg.Canonical()));
  ds.patches.reserve(n_total);
  ds.targets.reserve(n_total);
  ds.split.reserve(n_total);

  for (int i = 0; i < n_total; ++i) {
    Rng rng(MixSeed(cfg.seed, static_cast<std::uint64_t>(i)));
    const SoilTargets st = DrawTargets(cfg, rng);
    const std::vector<double> field = CleanSpectrum(cfg, st);

    HyperPatch patch;
    patch.axis = cfg.axis;
    patch.height = rng.IntInclusive(cfg.min_side, cfg.max_side);
    patch.width = rng.IntInclusive(cfg.min_side, cfg.max_side);
    const std::size_t pixels = static_cast<std::size_t>(patch.height) * patch.width;
    patch.mask.resize(pixels);
    patch.cube.resize(pixels * n_bands);

    // Elliptical parcel inscribed in the patch; the central pixel is always in.
    const double cy = 0.5 * patch.height;
    const double cx = 0.5 * patch.width;
    for (int r = 0; r < patch.height; ++r) {
      for (int c = 0; c < patch.width; ++c) {
        const double dy = (r + 0.5 - cy) / cy;
        const double dx = (c + 0.5 - cx) / cx;
        const bool in_field = dy * dy + dx * dx <= 1.0;
        patch.mask[static_cast<std::size_t>(r) * patch.width + c] = in_field ? 1 : 0;
        for (int b = 0; b < n_bands; ++b) {
          const double clean = in_field ? field[b] : 0.6 * BaseCurve(b, n_bands);
          const double v = clean + cfg.noise_sd * rng.Normal();
          patch.At(r, c, b) = static_cast<float>(std::max(v, 0.0));
        }
      }
    }

    ds.patches.push_back(std::move(patch));
    ds.targets.push_back(st);
    ds.split.push_back(i < cfg.n_train ? Split::kTrain : Split::kTest);
  }
  return ds;
}

}  // namespace hyperaudit
