#include "hyperaudit/aggregation.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "hyperaudit/errors.h"

namespace hyperaudit {
namespace {

void CheckFingerprint(const ShapMatrix& sm, const FeatureSchema& schema) {
  if (sm.n_features != schema.size() || sm.schema_fingerprint != schema.Fingerprint()) {
    throw ValidationError("schema fingerprint mismatch between shap matrix and schema");
  }
}

}  // namespace

std::vector<double> GlobalImportance(const ShapMatrix& sm) {
  std::vector<double> imp(sm.n_features, 0.0);
  for (std::size_t r = 0; r < sm.n_samples; ++r) {
    const auto row = sm.Row(r);
    for (std::size_t f = 0; f < sm.n_features; ++f) imp[f] += std::abs(row[f]);
  }
  return imp;
}

std::vector<int> RankByImportance(std::span<const double> importance) {
  std::vector<int> order(importance.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return importance[a] > importance[b]; });
  return order;
}

GroupMap GroupMap::Create(std::vector<Group> groups, std::size_t n_features) {
  std::vector<std::uint8_t> seen(n_features, 0);
  std::size_t covered = 0;
  for (const Group& g : groups) {
    for (const int id : g.ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= n_features) {
        throw std::invalid_argument("group '" + g.name + "' references feature id out of range");
      }
      if (seen[id]) {
        throw std::invalid_argument("groups overlap at feature " + std::to_string(id));
      }
      seen[id] = 1;
      ++covered;
    }
  }
  GroupMap gm;
  gm.groups_ = std::move(groups);
  gm.n_features_ = n_features;
  gm.coverage_ = covered == n_features;
  return gm;
}

GroupMap GroupMap::ByTransformation(const FeatureSchema& schema) {
  std::array<std::vector<int>, kNumTransformationGroups> ids;
  for (const FeatureEntry& e : schema.entries) ids[static_cast<std::size_t>(e.group)].push_back(e.id);
  std::vector<Group> groups;
  for (std::size_t g = 0; g < ids.size(); ++g) {
    if (ids[g].empty()) continue;
    groups.push_back({std::string(GroupName(static_cast<TransformationGroup>(g))), std::move(ids[g])});
  }
  return Create(std::move(groups), schema.size());
}

GroupMap GroupMap::ByBand(const FeatureSchema& schema) {
  std::vector<std::vector<int>> ids(schema.axis.n_bands);
  std::vector<int> nonspectral;
  for (const FeatureEntry& e : schema.entries) {
    (e.band ? ids[*e.band] : nonspectral).push_back(e.id);
  }
  std::vector<Group> groups;
  for (int b = 0; b < schema.axis.n_bands; ++b) {
    if (!ids[b].empty()) groups.push_back({"band_" + std::to_string(b), std::move(ids[b])});
  }
  if (!nonspectral.empty()) groups.push_back({"nonspectral", std::move(nonspectral)});
  return Create(std::move(groups), schema.size());
}

std::vector<double> GroupAttribution(std::span<const double> phi_row, const GroupMap& groups) {
  if (phi_row.size() != groups.n_features()) {
    throw std::invalid_argument("attribution row length does not match group map");
  }
  std::vector<double> out;
  out.reserve(groups.groups().size());
  for (const auto& g : groups.groups()) {
    double sum = 0.0;
    for (const int id : g.ids) sum += phi_row[id];
    out.push_back(sum);
  }
  return out;
}

std::vector<GroupImportance> TransformationImportance(const ShapMatrix& sm,
                                                      const FeatureSchema& schema,
                                                      GroupImportanceMode mode) {
  CheckFingerprint(sm, schema);
  const GroupMap gm = GroupMap::ByTransformation(schema);
  std::vector<GroupImportance> out;
  for (const auto& g : gm.groups()) {
    out.push_back({ParseGroup(g.name), g.ids.size(), 0.0});
  }
  for (std::size_t r = 0; r < sm.n_samples; ++r) {
    const auto row = sm.Row(r);
    for (std::size_t gi = 0; gi < gm.groups().size(); ++gi) {
      const auto& ids = gm.groups()[gi].ids;
      if (mode == GroupImportanceMode::kAbsOfGroupSum) {
        double sum = 0.0;
        for (const int id : ids) sum += row[id];
        out[gi].importance += std::abs(sum);
      } else {
        for (const int id : ids) out[gi].importance += std::abs(row[id]);
      }
    }
  }
  return out;
}

int WavelengthBin(const BandAxis& axis, int n_bins, double wavelength_nm) {
  const double pos = (wavelength_nm - axis.lambda_min_nm) / (axis.lambda_max_nm - axis.lambda_min_nm);
  const int bin = static_cast<int>(std::floor(pos * n_bins));
  return std::clamp(bin, 0, n_bins - 1);
}

BandGroupMatrix BandTransformationMatrix(const ShapMatrix& sm, const FeatureSchema& schema,
                                         int n_bins) {
  CheckFingerprint(sm, schema);
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  const BandAxis& axis = schema.axis;

  BandGroupMatrix m;
  const double width = (axis.lambda_max_nm - axis.lambda_min_nm) / n_bins;
  for (int i = 0; i <= n_bins; ++i) {
    m.bin_edges.push_back(i == n_bins ? axis.lambda_max_nm : axis.lambda_min_nm + i * width);
  }
  for (int i = 0; i < n_bins; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f-%.1f", m.bin_edges[i], m.bin_edges[i + 1]);
    m.col_labels.emplace_back(buf);
  }

  const std::vector<double> imp = GlobalImportance(sm);
  const double n = static_cast<double>(std::max<std::size_t>(sm.n_samples, 1));

  std::array<int, kNumTransformationGroups> row_of;
  row_of.fill(-1);
  std::array<double, kNumTransformationGroups> ns_sum{};
  std::array<int, kNumTransformationGroups> ns_count{};
  std::vector<std::vector<double>> sums;
  std::vector<std::vector<int>> counts;

  for (const FeatureEntry& e : schema.entries) {
    const auto g = static_cast<std::size_t>(e.group);
    if (!e.band) {
      ns_sum[g] += imp[e.id];
      ++ns_count[g];
      continue;
    }
    if (row_of[g] < 0) {
      row_of[g] = static_cast<int>(m.rows.size());
      m.rows.push_back(e.group);
      sums.emplace_back(n_bins, 0.0);
      counts.emplace_back(n_bins, 0);
    }
    const int bin = WavelengthBin(axis, n_bins, axis.WavelengthOf(*e.band));
    sums[row_of[g]][bin] += imp[e.id];
    ++counts[row_of[g]][bin];
  }

  // Rows in extraction order regardless of schema order.
  std::vector<std::size_t> order(m.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return m.rows[a] < m.rows[b]; });
  std::vector<TransformationGroup> rows;
  for (const std::size_t r : order) {
    rows.push_back(m.rows[r]);
    std::vector<double> cells(n_bins, 0.0);
    std::vector<bool> empty(n_bins, true);
    for (int b = 0; b < n_bins; ++b) {
      if (counts[r][b] == 0) continue;
      cells[b] = sums[r][b] / (counts[r][b] * n);
      empty[b] = false;
    }
    m.cells.push_back(std::move(cells));
    m.empty.push_back(std::move(empty));
  }
  m.rows = std::move(rows);

  for (std::size_t g = 0; g < kNumTransformationGroups; ++g) {
    if (ns_count[g] == 0) continue;
    m.nonspectral.emplace_back(static_cast<TransformationGroup>(g), ns_sum[g] / (ns_count[g] * n));
  }
  return m;
}

}  // namespace hyperaudit
