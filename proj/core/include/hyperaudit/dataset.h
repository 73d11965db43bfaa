#ifndef HYPERAUDIT_DATASET_H_
#define HYPERAUDIT_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hyperaudit {

// Linear wavelength axis between two endpoint band centers.
struct BandAxis {
  int n_bands = 0;
  double lambda_min_nm = 0.0;
  double lambda_max_nm = 0.0;

  // Throws std::invalid_argument when n_bands < 2 or the range is empty.
  void Validate() const;

  // Center wavelength of band `band_index`; throws std::out_of_range
  // ("band index out of range") outside [0, n_bands).
  double WavelengthOf(int band_index) const;

  bool operator==(const BandAxis&) const = default;
};

// Free-function form of BandAxis::WavelengthOf.
double WavelengthOf(int band_index, const BandAxis& axis);

// One field parcel. The cube is float32 because that is the interchange
// precision of the on-disk format; loading must reproduce it bit-exactly.
struct HyperPatch {
  int height = 0;
  int width = 0;
  BandAxis axis;
  std::vector<float> cube;          // [row][col][band], row-major
  std::vector<std::uint8_t> mask;   // [row][col], 1 = field pixel

  float At(int row, int col, int band) const {
    return cube[(static_cast<std::size_t>(row) * width + col) * axis.n_bands + band];
  }
  float& At(int row, int col, int band) {
    return cube[(static_cast<std::size_t>(row) * width + col) * axis.n_bands + band];
  }
  bool Masked(int row, int col) const {
    return mask[static_cast<std::size_t>(row) * width + col] != 0;
  }
  std::size_t MaskedCount() const;

  // Throws std::invalid_argument describing the first violated invariant.
  void Validate() const;

  bool operator==(const HyperPatch&) const = default;
};

enum class Target { kP = 0, kK = 1, kMg = 2, kPh = 3 };

inline constexpr std::array<Target, 4> kAllTargets = {Target::kP, Target::kK,
                                                      Target::kMg, Target::kPh};

// "P", "K", "Mg", "pH".
std::string_view TargetName(Target t);
// Inverse of TargetName; throws std::invalid_argument on unknown names.
Target ParseTarget(std::string_view name);

// Soil parameters: P, K, Mg in mg/kg, pH unitless.
struct SoilTargets {
  double p = 0.0;
  double k = 0.0;
  double mg = 0.0;
  double ph = 0.0;

  double Get(Target t) const;
  double& Get(Target t);
  void Validate() const;

  bool operator==(const SoilTargets&) const = default;
};

enum class Split { kTrain, kTest };

std::string_view SplitName(Split s);
Split ParseSplit(std::string_view name);

struct Dataset {
  BandAxis axis;
  std::vector<HyperPatch> patches;
  std::vector<SoilTargets> targets;
  std::vector<Split> split;
  std::string provenance;

  std::size_t size() const { return patches.size(); }

  // Sample indices belonging to `s`, in dataset order.
  std::vector<std::size_t> Indices(Split s) const;

  // Target column for all samples, dataset order.
  std::vector<double> TargetColumn(Target t) const;

  void Validate() const;

  bool operator==(const Dataset&) const = default;
};

}  // namespace hyperaudit

#endif  // HYPERAUDIT_DATASET_H_
