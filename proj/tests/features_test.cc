#include "hyperaudit/features.h"

#include <cmath>
#include <set>
#include <utility>

#include "gtest/gtest.h"
#include "hyperaudit/errors.h"
#include "hyperaudit/features_io.h"
#include "hyperaudit/parallel.h"
#include "hyperaudit/synthetic.h"
#include "test_util.h"

namespace hyperaudit {
namespace {

using testing::TempDir;

HyperPatch ConstantPatch(int h, int w, int bands, float value) {
  HyperPatch p;
  p.height = h;
  p.width = w;
  p.axis = BandAxis{bands, 400.0, 900.0};
  p.cube.assign(static_cast<std::size_t>(h) * w * bands, value);
  p.mask.assign(static_cast<std::size_t>(h) * w, 1);
  return p;
}

// Values of one group, in band order.
std::vector<double> GroupValues(const PatchFeatures& pf, TransformationGroup g) {
  std::vector<double> out;
  for (const FeatureEntry& e : pf.schema.entries) {
    if (e.group == g) out.push_back(pf.values[e.id]);
  }
  return out;
}

Dataset SeventySamples() {
  SyntheticConfig cfg;
  cfg.n_train = 50;
  cfg.n_test = 20;
  cfg.min_side = 4;
  cfg.max_side = 16;
  cfg.seed = 2;
  return GenerateSynthetic(cfg);
}

TEST(FeatureSchemaTest, CountsFollowGroupArithmetic) {
  const BandAxis axis{150, 462.080, 938.370};
  EXPECT_EQ(BuildSchema(axis, false).size(), 597u);
  EXPECT_EQ(BuildSchema(axis, true).size(), 899u);
  const BandAxis small{50, 462.080, 938.370};
  EXPECT_EQ(BuildSchema(small, true).size() - BuildSchema(small, false).size(), 2u * 50 + 2);
}

TEST(FeatureSchemaTest, TotalAndContiguous) {
  const FeatureSchema schema = BuildSchema(BandAxis{12, 400.0, 900.0}, true);
  EXPECT_NO_THROW(schema.Validate());
  std::set<std::string> labels;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    EXPECT_EQ(schema.entries[i].id, static_cast<int>(i));
    if (schema.entries[i].band) {
      EXPECT_LT(*schema.entries[i].band, 12);
      EXPECT_TRUE(labels.insert(schema.Label(i)).second) << "duplicate " << schema.Label(i);
    }
  }
  // The two meta features have no band; they are the only shared label.
  EXPECT_EQ(labels.size() + 2, schema.size());
}

TEST(FeatureSchemaTest, LabelsAndProvenance) {
  const FeatureSchema schema = BuildSchema(BandAxis{5, 400.0, 900.0}, true);
  EXPECT_EQ(schema.Label(0), "g:mean_spectrum|b:0");
  EXPECT_EQ(schema.Label(5), "g:std_spectrum|b:0");
  // grad1 over bands (k, k+1) is attributed to band k.
  EXPECT_EQ(schema.Label(10), "g:grad1|b:0");
  EXPECT_EQ(schema.Label(13), "g:grad1|b:3");
  EXPECT_EQ(schema.Label(14), "g:grad2|b:0");
  EXPECT_EQ(schema.Label(schema.size() - 1), "g:meta|b:NA");
}

TEST(FeatureSchemaTest, FingerprintSeparatesModesAndAxes) {
  const BandAxis axis{20, 400.0, 900.0};
  EXPECT_EQ(BuildSchema(axis, false).Fingerprint(), BuildSchema(axis, false).Fingerprint());
  EXPECT_NE(BuildSchema(axis, false).Fingerprint(), BuildSchema(axis, true).Fingerprint());
  EXPECT_NE(BuildSchema(axis, false).Fingerprint(),
            BuildSchema(BandAxis{20, 400.0, 901.0}, false).Fingerprint());
  EXPECT_EQ(BuildSchema(axis, false).Fingerprint().size(), 16u);
}

TEST(GroupNameTest, RoundTrip) {
  for (std::size_t g = 0; g < kNumTransformationGroups; ++g) {
    const auto group = static_cast<TransformationGroup>(g);
    EXPECT_EQ(ParseGroup(GroupName(group)), group);
  }
  EXPECT_THROW(ParseGroup("fft"), std::invalid_argument);
  EXPECT_TRUE(IsSpatialGroup(TransformationGroup::kMeta));
  EXPECT_FALSE(IsSpatialGroup(TransformationGroup::kGrad2));
}

TEST(ExtractPatchTest, ConstantPatchSpectralMode) {
  const PatchFeatures pf = ExtractPatch(ConstantPatch(3, 4, 6, 0.375f), false);
  ASSERT_EQ(pf.values.size(), 4u * 6 - 3);
  for (const double v : GroupValues(pf, TransformationGroup::kMeanSpectrum)) EXPECT_EQ(v, 0.375);
  for (const double v : GroupValues(pf, TransformationGroup::kStdSpectrum)) EXPECT_EQ(v, 0.0);
  for (const double v : GroupValues(pf, TransformationGroup::kGrad1)) EXPECT_EQ(v, 0.0);
  for (const double v : GroupValues(pf, TransformationGroup::kGrad2)) EXPECT_EQ(v, 0.0);
}

TEST(ExtractPatchTest, TwoPixelHandArithmetic) {
  HyperPatch p = ConstantPatch(1, 2, 3, 0.5f);
  p.At(0, 0, 0) = 1.0f;
  p.At(0, 1, 0) = 3.0f;
  const PatchFeatures pf = ExtractPatch(p, true);
  EXPECT_DOUBLE_EQ(GroupValues(pf, TransformationGroup::kMeanSpectrum)[0], 2.0);
  EXPECT_DOUBLE_EQ(GroupValues(pf, TransformationGroup::kStdSpectrum)[0], 1.0);
  EXPECT_DOUBLE_EQ(GroupValues(pf, TransformationGroup::kSpatialVar)[0], 1.0);
  EXPECT_DOUBLE_EQ(GroupValues(pf, TransformationGroup::kSpatialEdge)[0], 2.0);
  EXPECT_DOUBLE_EQ(GroupValues(pf, TransformationGroup::kSpatialEdge)[1], 0.0);
  const auto meta = GroupValues(pf, TransformationGroup::kMeta);
  EXPECT_DOUBLE_EQ(meta[0], std::log(2.0));
  EXPECT_DOUBLE_EQ(meta[1], 2.0);
}

TEST(ExtractPatchTest, AffineMeanSpectrumHasConstantGrad1AndZeroGrad2) {
  HyperPatch p = ConstantPatch(2, 2, 8, 0.0f);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < 8; ++k) p.At(r, c, k) = static_cast<float>(1 + 2 * k + r);
    }
  }
  const PatchFeatures pf = ExtractPatch(p, false);
  for (const double v : GroupValues(pf, TransformationGroup::kGrad1)) EXPECT_EQ(v, 2.0);
  for (const double v : GroupValues(pf, TransformationGroup::kGrad2)) EXPECT_EQ(v, 0.0);
}

TEST(ExtractPatchTest, UnmaskedPixelsDoNotMatter) {
  HyperPatch p = ConstantPatch(4, 4, 5, 0.2f);
  for (std::size_t i = 0; i < p.cube.size(); ++i) p.cube[i] = 0.01f * static_cast<float>(i % 37);
  p.mask = {0, 1, 1, 0,  //
            1, 1, 1, 1,  //
            0, 1, 0, 1,  //
            1, 1, 1, 0};
  HyperPatch q = p;
  for (int k = 0; k < 5; ++k) {
    q.At(0, 0, k) = 9.0f;
    q.At(2, 2, k) = 7.0f;
    q.At(3, 3, k) = 5.0f;
  }
  for (const bool spatial : {false, true}) {
    EXPECT_EQ(ExtractPatch(p, spatial).values, ExtractPatch(q, spatial).values);
  }
}

TEST(ExtractPatchTest, EdgeUsesOnlyMaskedPairs) {
  HyperPatch p = ConstantPatch(1, 3, 2, 1.0f);
  p.mask = {1, 0, 1};
  p.At(0, 2, 0) = 5.0f;
  const auto edge = GroupValues(ExtractPatch(p, true), TransformationGroup::kSpatialEdge);
  EXPECT_EQ(edge[0], 0.0);  // no adjacent masked pair
}

TEST(ExtractDatasetTest, ShapeAndDeterminism) {
  const Dataset ds = SeventySamples();
  const FeatureTable a = ExtractDataset(ds, false);
  EXPECT_EQ(a.n_samples, 70u);
  EXPECT_EQ(a.n_features(), 197u);
  EXPECT_NO_THROW(a.Validate());
  const FeatureTable b = ExtractDataset(ds, false);
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_EQ(ExtractDataset(ds, true).n_features(), 197u + 2 * 50 + 2);
}

TEST(ExtractDatasetTest, RowsMatchPerPatchExtractionAtAnyThreadCount) {
  const Dataset ds = SeventySamples();
  SetMaxThreads(1);
  const FeatureTable serial = ExtractDataset(ds, true);
  SetMaxThreads(4);
  const FeatureTable parallel = ExtractDataset(ds, true);
  SetMaxThreads(0);
  EXPECT_EQ(serial.matrix, parallel.matrix);
  for (const std::size_t i : {0u, 33u, 69u}) {
    const auto row = serial.Row(i);
    EXPECT_EQ(std::vector<double>(row.begin(), row.end()), ExtractPatch(ds.patches[i], true).values);
    EXPECT_EQ(serial.sample_ids[i], static_cast<int>(i));
  }
}

TEST(FeatureTableTest, SelectRowsAndColumn) {
  const FeatureTable t = ExtractDataset(SeventySamples(), false);
  const std::vector<std::size_t> rows{5, 2};
  const FeatureTable s = t.SelectRows(rows);
  EXPECT_EQ(s.n_samples, 2u);
  EXPECT_EQ(s.sample_ids, (std::vector<int>{5, 2}));
  EXPECT_EQ(s.At(1, 7), t.At(2, 7));
  EXPECT_EQ(t.Column(3)[10], t.At(10, 3));
}

TEST(FeaturesIoTest, SchemaAndTableRoundTrip) {
  TempDir dir("features_io");
  const FeatureTable t = ExtractDataset(SeventySamples(), true);
  SaveSchema(t.schema, dir.path() / "schema.json");
  const FeatureSchema schema = LoadSchema(dir.path() / "schema.json");
  EXPECT_EQ(schema, t.schema);
  SaveFeatureTable(t, dir.path() / "table.csv");
  const FeatureTable back = LoadFeatureTable(dir.path() / "table.csv", schema);
  EXPECT_EQ(back.matrix, t.matrix);
  EXPECT_EQ(back.sample_ids, t.sample_ids);
}

TEST(FeaturesIoTest, HeaderMismatchIsValidationError) {
  TempDir dir("features_hdr");
  const FeatureTable t = ExtractDataset(SeventySamples(), false);
  SaveFeatureTable(t, dir.path() / "table.csv");
  const FeatureSchema other = BuildSchema(t.schema.axis, true);
  EXPECT_THROW(LoadFeatureTable(dir.path() / "table.csv", other), ValidationError);
}

}  // namespace
}  // namespace hyperaudit
