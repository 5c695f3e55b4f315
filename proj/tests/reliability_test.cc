// Copyright 2026 The HD3 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hd3/reliability.h"

#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

namespace hd3 {
namespace {

ScalarImage Filled(int w, int h, double v) {
  ScalarImage img(w, h, 1);
  for (double& p : img.values()) p = v;
  return img;
}

TEST(UncertaintyTest, Examples) {
  EXPECT_EQ(ClassifyByUncertainty(Filled(4, 3, 1.0), 0.3).Count(), 0u);
  EXPECT_EQ(ClassifyByUncertainty(Filled(4, 3, 0.5), 0.3).Count(), 12u);
  ScalarImage c(2, 1, 1);
  c.at(0, 0) = 0.8;
  c.at(1, 0) = 0.6;
  const Mask m = ClassifyByUncertainty(c, kDefaultUncertaintyThreshold);
  EXPECT_FALSE(m.at(0, 0));
  EXPECT_TRUE(m.at(1, 0));
}

TEST(UncertaintyTest, SigmaRange) {
  const ScalarImage c = Filled(1, 1, 0.5);
  EXPECT_THROW(ClassifyByUncertainty(c, 0.0), std::invalid_argument);
  EXPECT_THROW(ClassifyByUncertainty(c, 1.0), std::invalid_argument);
  EXPECT_THROW(ClassifyByUncertainty(c, -0.2), std::invalid_argument);
}

TEST(UncertaintyTest, MonotoneInSigma) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarImage c(32, 32, 1);
  for (double& v : c.values()) v = u(rng);
  std::size_t prev = c.values().size() + 1;
  for (double s = 0.05; s < 1.0; s += 0.05) {
    const Mask m = ClassifyByUncertainty(c, s);
    EXPECT_LE(m.Count(), prev);
    prev = m.Count();
  }
}

TEST(FbConsistencyTest, RigidTranslationIsConsistent) {
  const auto fw = MotionField::Constant(16, 16, FieldDim::kFlow, {2, -1});
  const auto bw = MotionField::Constant(16, 16, FieldDim::kFlow, {-2, 1});
  const Mask m = ClassifyByFbConsistency(fw, bw);
  for (int y = 1; y < 16; ++y) {
    for (int x = 0; x < 14; ++x) EXPECT_FALSE(m.at(x, y));
  }
  // Lands outside frame 2.
  EXPECT_TRUE(m.at(15, 5));
  EXPECT_TRUE(m.at(3, 0));
}

TEST(FbConsistencyTest, AbsoluteBranch) {
  const auto fw = MotionField::Constant(32, 4, FieldDim::kFlow, {10, 0});
  const MotionField bw(32, 4, FieldDim::kFlow);
  const Mask m = ClassifyByFbConsistency(fw, bw);
  for (int x = 0; x < 22; ++x) EXPECT_TRUE(m.at(x, 2));
}

TEST(FbConsistencyTest, RelativeBranch) {
  const auto fw = MotionField::Constant(128, 1, FieldDim::kFlow, {100, 0});
  const auto bw = MotionField::Constant(128, 1, FieldDim::kFlow, {-96, 0});
  const Mask m = ClassifyByFbConsistency(fw, bw);
  EXPECT_FALSE(m.at(5, 0));
  const auto bw2 = MotionField::Constant(128, 1, FieldDim::kFlow, {-90, 0});
  EXPECT_TRUE(ClassifyByFbConsistency(fw, bw2).at(5, 0));
}

TEST(FbConsistencyTest, InvalidInputsAreOutliers) {
  auto fw = MotionField::Constant(8, 8, FieldDim::kFlow, {1, 0});
  auto bw = MotionField::Constant(8, 8, FieldDim::kFlow, {-1, 0});
  fw.Invalidate(2, 2);
  bw.Invalidate(5, 5);
  const Mask m = ClassifyByFbConsistency(fw, bw);
  EXPECT_TRUE(m.at(2, 2));
  EXPECT_TRUE(m.at(4, 5));
  EXPECT_FALSE(m.at(3, 3));
  EXPECT_THROW(ClassifyByFbConsistency(fw, MotionField(4, 8, FieldDim::kFlow)),
               std::invalid_argument);
}

// truth is zero; the listed pixels get an estimate 10 px off.
MotionField WithOutliers(int n, std::initializer_list<int> bad) {
  MotionField est(n, 1, FieldDim::kFlow);
  for (int x : bad) est.Set(x, 0, {10, 0});
  return est;
}

Mask Marks(int n, std::initializer_list<int> xs) {
  Mask m(n, 1);
  for (int x : xs) m.set(x, 0, true);
  return m;
}

TEST(ScoreTest, PerfectAndComplement) {
  const MotionField truth(10, 1, FieldDim::kFlow);
  const MotionField est = WithOutliers(10, {1, 4, 7});
  const Mask noc(10, 1, true);
  const OutlierReport r = ScoreClassification(Marks(10, {1, 4, 7}), truth, est, noc);
  EXPECT_EQ(r.all.outlier.iou, 100.0);
  EXPECT_EQ(r.all.inlier.acc, 100.0);
  EXPECT_EQ(r.noc.mean.iou, 100.0);
  const OutlierReport c =
      ScoreClassification(Marks(10, {0, 2, 3, 5, 6, 8, 9}), truth, est, noc);
  EXPECT_EQ(c.all.outlier.iou, 0.0);
  EXPECT_EQ(c.all.inlier.iou, 0.0);
}

TEST(ScoreTest, TenPixelExample) {
  const MotionField truth(10, 1, FieldDim::kFlow);
  const MotionField est = WithOutliers(10, {0, 1, 2, 3});
  const Mask pred = Marks(10, {0, 1, 2, 4, 5});
  const OutlierReport r = ScoreClassification(pred, truth, est, Mask(10, 1, true));
  EXPECT_NEAR(r.all.outlier.iou, 50.0, 1e-12);
  EXPECT_NEAR(r.all.outlier.acc, 75.0, 1e-12);
  EXPECT_NEAR(r.all.inlier.iou, 400.0 / 7, 1e-12);
  EXPECT_NEAR(r.all.inlier.acc, 200.0 / 3, 1e-12);
  EXPECT_NEAR(r.all.mean.iou, (50.0 + 400.0 / 7) / 2, 1e-12);
  EXPECT_EQ(r.all.pixels, 10u);
}

TEST(ScoreTest, NocRestrictsAndInvalidTruthIsIgnored) {
  MotionField truth(10, 1, FieldDim::kFlow);
  truth.Invalidate(9, 0);
  const MotionField est = WithOutliers(10, {0, 1, 2, 3});
  const Mask pred = Marks(10, {0, 1, 2, 4, 5, 9});
  const OutlierReport r = ScoreClassification(pred, truth, est, Marks(10, {0, 1, 6, 7}));
  EXPECT_EQ(r.all.pixels, 9u);
  EXPECT_NEAR(r.all.outlier.iou, 50.0, 1e-12);
  EXPECT_EQ(r.noc.pixels, 4u);
  EXPECT_EQ(r.noc.outlier.iou, 100.0);
  EXPECT_EQ(r.noc.inlier.acc, 100.0);
}

TEST(ScoreTest, KittiRuleUsesAnd) {
  const auto truth = MotionField::Constant(2, 1, FieldDim::kFlow, {100, 0});
  MotionField est = truth;
  est.Set(0, 0, {104, 0});  // 4 px but 4%: inlier
  est.Set(1, 0, {106, 0});
  const Mask gt = TrueOutliers(est, truth);
  EXPECT_FALSE(gt.at(0, 0));
  EXPECT_TRUE(gt.at(1, 0));
}

TEST(ScoreTest, Errors) {
  const MotionField truth(4, 1, FieldDim::kFlow);
  EXPECT_THROW(ScoreClassification(Mask(4, 1), truth, truth, Mask(4, 1)),
               std::invalid_argument);
  EXPECT_THROW(ScoreClassification(Mask(3, 1), truth, truth, Mask(4, 1, true)),
               std::invalid_argument);
}

TEST(ReportTest, Formats) {
  const MotionField truth(10, 1, FieldDim::kFlow);
  const OutlierReport r = ScoreClassification(Marks(10, {0, 1, 2, 4, 5}), truth,
                                              WithOutliers(10, {0, 1, 2, 3}),
                                              Mask(10, 1, true));
  const std::string kv = OutlierKeyValues(r);
  EXPECT_NE(kv.find("all.outlier.iou=50.000"), std::string::npos);
  EXPECT_NE(kv.find("all.outlier.acc=75.000"), std::string::npos);
  const std::string table = FormatOutlierTable(r);
  EXPECT_NE(table.find("Outlier"), std::string::npos);
  EXPECT_NE(table.find("50.0    75.0"), std::string::npos);
}

}  // namespace
}  // namespace hd3
