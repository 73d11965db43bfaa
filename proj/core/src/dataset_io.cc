#include "hyperaudit/dataset_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "hyperaudit/errors.h"
#include "io_util.h"
#include "json.hpp"

namespace hyperaudit {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestVersion = "v1";

std::string CubeName(std::size_t i) { return "patch_" + std::to_string(i) + ".f32"; }
std::string MaskName(std::size_t i) { return "mask_" + std::to_string(i) + ".bits"; }

std::string EncodeCube(const std::vector<float>& cube) {
  std::string bytes(cube.size() * 4, '\0');
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(cube[i]);
    for (int k = 0; k < 4; ++k) {
      bytes[i * 4 + k] = static_cast<char>((bits >> (8 * k)) & 0xffu);
    }
  }
  return bytes;
}

std::vector<float> DecodeCube(const std::string& bytes) {
  std::vector<float> cube(bytes.size() / 4);
  for (std::size_t i = 0; i < cube.size(); ++i) {
    std::uint32_t bits = 0;
    for (int k = 0; k < 4; ++k) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + k])) << (8 * k);
    }
    cube[i] = std::bit_cast<float>(bits);
  }
  return cube;
}

std::string EncodeMask(const std::vector<std::uint8_t>& mask) {
  std::string bytes((mask.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) bytes[i / 8] = static_cast<char>(bytes[i / 8] | (1u << (i % 8)));
  }
  return bytes;
}

std::vector<std::uint8_t> DecodeMask(const std::string& bytes, std::size_t pixels) {
  std::vector<std::uint8_t> mask(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    mask[i] = (static_cast<unsigned char>(bytes[i / 8]) >> (i % 8)) & 1u;
  }
  return mask;
}

json AxisToJson(const BandAxis& axis) {
  return {{"n_bands", axis.n_bands},
          {"lambda_min_nm", axis.lambda_min_nm},
          {"lambda_max_nm", axis.lambda_max_nm}};
}

}  // namespace

void SaveDataset(const Dataset& ds, const fs::path& dir) {
  ds.Validate();
  fs::create_directories(dir);

  json manifest;
  manifest["version"] = kManifestVersion;
  manifest["axis"] = AxisToJson(ds.axis);
  manifest["n_samples"] = ds.size();
  manifest["n_train"] = ds.Indices(Split::kTrain).size();
  manifest["n_test"] = ds.Indices(Split::kTest).size();
  manifest["provenance"] = ds.provenance;
  json samples = json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const HyperPatch& p = ds.patches[i];
    json targets;
    for (const Target t : kAllTargets) targets[std::string(TargetName(t))] = ds.targets[i].Get(t);
    samples.push_back({{"index", i},
                       {"height", p.height},
                       {"width", p.width},
                       {"cube", CubeName(i)},
                       {"mask", MaskName(i)},
                       {"split", SplitName(ds.split[i])},
                       {"targets", targets}});
    WriteFileBytes(dir / CubeName(i), EncodeCube(p.cube));
    WriteFileBytes(dir / MaskName(i), EncodeMask(p.mask));
  }
  manifest["samples"] = std::move(samples);
  WriteFileBytes(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset LoadDataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  json manifest;
  try {
    manifest = json::parse(ReadFileBytes(manifest_path));
  } catch (const json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }

  Dataset ds;
  std::size_t declared = 0;
  try {
    if (manifest.at("version").get<std::string>() != kManifestVersion) {
      throw ValidationError(manifest_path.string() + ": unsupported manifest version");
    }
    const json& axis = manifest.at("axis");
    ds.axis.n_bands = axis.at("n_bands").get<int>();
    ds.axis.lambda_min_nm = axis.at("lambda_min_nm").get<double>();
    ds.axis.lambda_max_nm = axis.at("lambda_max_nm").get<double>();
    ds.provenance = manifest.at("provenance").get<std::string>();
    declared = manifest.at("n_samples").get<std::size_t>();
    ds.axis.Validate();
  } catch (const json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }

  const json& samples = manifest.at("samples");
  if (!samples.is_array() || samples.size() != declared) {
    throw ValidationError(manifest_path.string() + ": sample list does not match n_samples");
  }

  for (std::size_t i = 0; i < declared; ++i) {
    const std::string where = "patch " + std::to_string(i);
    try {
      const json& s = samples[i];
      if (s.at("index").get<std::size_t>() != i) throw ValidationError("index out of order");
      HyperPatch p;
      p.axis = ds.axis;
      p.height = s.at("height").get<int>();
      p.width = s.at("width").get<int>();
      if (p.height < 1 || p.width < 1) throw ValidationError("non-positive dimensions");
      const std::size_t pixels = static_cast<std::size_t>(p.height) * p.width;

      const fs::path cube_path = dir / s.at("cube").get<std::string>();
      const fs::path mask_path = dir / s.at("mask").get<std::string>();
      if (!fs::exists(cube_path)) throw ValidationError("missing cube file " + cube_path.string());
      if (!fs::exists(mask_path)) throw ValidationError("missing mask file " + mask_path.string());
      const std::string cube_bytes = ReadFileBytes(cube_path);
      if (cube_bytes.size() != pixels * ds.axis.n_bands * 4) {
        throw ValidationError("cube file size does not match manifest dimensions");
      }
      const std::string mask_bytes = ReadFileBytes(mask_path);
      if (mask_bytes.size() != (pixels + 7) / 8) {
        throw ValidationError("mask file size does not match manifest dimensions");
      }
      p.cube = DecodeCube(cube_bytes);
      p.mask = DecodeMask(mask_bytes, pixels);
      for (const float v : p.cube) {
        if (!std::isfinite(v)) throw ValidationError("non-finite reflectance");
      }
      p.Validate();

      SoilTargets st;
      for (const Target t : kAllTargets) {
        st.Get(t) = s.at("targets").at(std::string(TargetName(t))).get<double>();
      }
      st.Validate();

      ds.patches.push_back(std::move(p));
      ds.targets.push_back(st);
      ds.split.push_back(ParseSplit(s.at("split").get<std::string>()));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }

  try {
    ds.Validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(dir.string() + ": " + e.what());
  }
  return ds;
}

}  // namespace hyperaudit
