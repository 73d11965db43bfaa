#include "hyperaudit/dataset.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hyperaudit {

void BandAxis::Validate() const {
  if (n_bands < 2) throw std::invalid_argument("band axis needs at least 2 bands");
  if (!std::isfinite(lambda_min_nm) || !std::isfinite(lambda_max_nm) ||
      !(lambda_min_nm < lambda_max_nm)) {
    throw std::invalid_argument("band axis requires lambda_min_nm < lambda_max_nm");
  }
}

double BandAxis::WavelengthOf(int band_index) const {
  if (band_index < 0 || band_index >= n_bands) {
    throw std::out_of_range("band index out of range");
  }
  return lambda_min_nm +
         band_index * (lambda_max_nm - lambda_min_nm) / (n_bands - 1);
}

double WavelengthOf(int band_index, const BandAxis& axis) {
  return axis.WavelengthOf(band_index);
}

std::size_t HyperPatch::MaskedCount() const {
  std::size_t count = 0;
  for (const auto m : mask) count += m != 0;
  return count;
}

void HyperPatch::Validate() const {
  axis.Validate();
  if (height < 1 || width < 1) throw std::invalid_argument("patch has empty extent");
  const std::size_t pixels = static_cast<std::size_t>(height) * width;
  if (cube.size() != pixels * axis.n_bands) {
    throw std::invalid_argument("cube size does not match height*width*bands");
  }
  if (mask.size() != pixels) throw std::invalid_argument("mask size does not match height*width");
  if (MaskedCount() == 0) throw std::invalid_argument("patch has no masked pixels");
  for (const float v : cube) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite reflectance");
    if (v < 0.0f) throw std::invalid_argument("negative reflectance");
  }
}

std::string_view TargetName(Target t) {
  switch (t) {
    case Target::kP: return "P";
    case Target::kK: return "K";
    case Target::kMg: return "Mg";
    case Target::kPh: return "pH";
  }
  return "?";
}

Target ParseTarget(std::string_view name) {
  for (const Target t : kAllTargets) {
    if (TargetName(t) == name) return t;
  }
  throw std::invalid_argument("unknown target '" + std::string(name) + "'");
}

double SoilTargets::Get(Target t) const {
  switch (t) {
    case Target::kP: return p;
    case Target::kK: return k;
    case Target::kMg: return mg;
    case Target::kPh: return ph;
  }
  return 0.0;
}

double& SoilTargets::Get(Target t) {
  switch (t) {
    case Target::kP: return p;
    case Target::kK: return k;
    case Target::kMg: return mg;
    case Target::kPh: break;
  }
  return ph;
}

void SoilTargets::Validate() const {
  for (const Target t : kAllTargets) {
    if (!std::isfinite(Get(t))) {
      throw std::invalid_argument("non-finite target " + std::string(TargetName(t)));
    }
  }
  if (!(p > 0.0 && k > 0.0 && mg > 0.0)) {
    throw std::invalid_argument("P, K and Mg must be positive");
  }
  if (!(ph >= 3.0 && ph <= 10.0)) throw std::invalid_argument("pH outside [3, 10]");
}

std::string_view SplitName(Split s) { return s == Split::kTrain ? "train" : "test"; }

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

std::vector<std::size_t> Dataset::Indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

std::vector<double> Dataset::TargetColumn(Target t) const {
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& st : targets) out.push_back(st.Get(t));
  return out;
}

void Dataset::Validate() const {
  axis.Validate();
  if (patches.size() != targets.size() || patches.size() != split.size()) {
    throw std::invalid_argument("patches, targets and split labels are not aligned");
  }
  if (Indices(Split::kTrain).empty() || Indices(Split::kTest).empty()) {
    throw std::invalid_argument("both train and test splits must be non-empty");
  }
  for (std::size_t i = 0; i < patches.size(); ++i) {
    try {
      if (patches[i].axis != axis) throw std::invalid_argument("band axis differs from dataset axis");
      patches[i].Validate();
      targets[i].Validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("sample " + std::to_string(i) + ": " + e.what());
    }
  }
}

}  // namespace hyperaudit
