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


#include "hd3/io.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace hd3 {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hd3_io_" + std::string(::testing::UnitTest::GetInstance()
                                        ->current_test_info()
                                        ->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path Path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

void ExpectSameField(const MotionField& a, const MotionField& b) {
  ASSERT_EQ(a.width(), b.width());
  ASSERT_EQ(a.height(), b.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      ASSERT_EQ(a.valid(x, y), b.valid(x, y)) << x << "," << y;
      if (a.valid(x, y)) {
        ASSERT_EQ(a.at(x, y), b.at(x, y)) << x << "," << y;
      }
    }
  }
}

TEST_F(IoTest, FloHandSerializedBytes) {
  const auto f = MotionField::Constant(1, 1, FieldDim::kFlow, {1.5, -2.0});
  const std::vector<std::uint8_t> want = {0x50, 0x49, 0x45, 0x48, 0x01, 0x00, 0x00,
                                          0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00,
                                          0xC0, 0x3F, 0x00, 0x00, 0x00, 0xC0};
  EXPECT_EQ(EncodeFlo(f), want);
  WriteFlo(Path("a.flo"), f);
  EXPECT_EQ(fs::file_size(Path("a.flo")), 20u);
  ExpectSameField(ReadFlo(Path("a.flo")), f);
}

TEST_F(IoTest, FloErrors) {
  std::vector<std::uint8_t> bytes =
      EncodeFlo(MotionField::Constant(2, 2, FieldDim::kFlow, {1, 1}));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(DecodeFlo(bad), FormatError);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(DecodeFlo(bytes), FormatError);
  EXPECT_THROW(DecodeFlo({0x50, 0x49}), FormatError);
  EXPECT_THROW(ReadFlo(Path("missing.flo")), FormatError);
}

TEST_F(IoTest, FloInvalidAndStereo) {
  MotionField f = MotionField::Constant(3, 1, FieldDim::kFlow, {0.25, 4});
  f.Invalidate(1, 0);
  const auto bytes = EncodeFlo(f);
  float u;
  std::memcpy(&u, bytes.data() + 12 + 8, 4);
  EXPECT_EQ(u, kFloUnknown);
  ExpectSameField(DecodeFlo(bytes), f);

  const auto stereo = MotionField::Constant(2, 1, FieldDim::kStereo, {-3, 0});
  const MotionField back = DecodeFlo(EncodeFlo(stereo));
  EXPECT_EQ(back.dim(), FieldDim::kFlow);
  EXPECT_EQ(back.at(1, 0), (Vec2{-3, 0}));
}

TEST_F(IoTest, FloRandomRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-300.0f, 300.0f);
  std::uniform_int_distribution<int> side(1, 12);
  for (int t = 0; t < 1000; ++t) {
    MotionField f(side(rng), side(rng), FieldDim::kFlow);
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        if (rng() % 10 == 0) {
          f.Invalidate(x, y);
        } else {
          f.Set(x, y, {u(rng), u(rng)});
        }
      }
    }
    ExpectSameField(DecodeFlo(EncodeFlo(f)), f);
  }
}

TEST_F(IoTest, KittiExamples) {
  const auto zero = EncodeKittiFlow({0, 0}, true);
  EXPECT_EQ(zero, (std::array<std::uint16_t, 3>{32768, 32768, 1}));
  EXPECT_EQ(EncodeKittiFlow({1, -0.5}, true),
            (std::array<std::uint16_t, 3>{32832, 32736, 1}));
  EXPECT_EQ(EncodeKittiFlow({1, 1}, false), (std::array<std::uint16_t, 3>{0, 0, 0}));
  EXPECT_EQ(EncodeKittiDisparity(5.0), 1280);

  PngData png{2, 1, 1, 16, false, {0, 1280}};
  WritePng(Path("d.png"), png);
  const MotionField d = ReadKittiDisparity(Path("d.png"));
  EXPECT_FALSE(d.valid(0, 0));
  EXPECT_EQ(d.at(1, 0), (Vec2{-5, 0}));
}

TEST_F(IoTest, KittiNeeds16Bit) {
  WritePng(Path("f8.png"), PngData{1, 1, 3, 8, false, {1, 2, 1}});
  WritePng(Path("d8.png"), PngData{1, 1, 1, 8, false, {10}});
  EXPECT_THROW(ReadKittiFlow(Path("f8.png")), FormatError);
  EXPECT_THROW(ReadKittiDisparity(Path("d8.png")), FormatError);
}

TEST_F(IoTest, KittiRandomRoundTrips) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> raw(-20000, 20000);
  std::uniform_int_distribution<int> disp(1, 60000);
  for (int t = 0; t < 50; ++t) {
    MotionField f(7, 5, FieldDim::kFlow);
    MotionField s(7, 5, FieldDim::kStereo);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 7; ++x) {
        f.Set(x, y, {raw(rng) / 64.0, raw(rng) / 64.0});
        s.Set(x, y, {-disp(rng) / 256.0, 0});
      }
    }
    f.Invalidate(t % 7, t % 5);
    s.Invalidate(t % 7, t % 5);
    WriteKittiFlow(Path("f.png"), f);
    WriteKittiDisparity(Path("s.png"), s);
    ExpectSameField(ReadKittiFlow(Path("f.png")), f);
    ExpectSameField(ReadKittiDisparity(Path("s.png")), s);
  }
}

TEST_F(IoTest, FieldDispatch) {
  const auto f = MotionField::Constant(4, 2, FieldDim::kFlow, {2.5, -1});
  WriteField(Path("x.flo"), f);
  WriteField(Path("x.png"), f);
  ExpectSameField(ReadField(Path("x.flo")), f);
  ExpectSameField(ReadField(Path("x.png")), f);
  EXPECT_THROW(WriteField(Path("x.txt"), f), FormatError);
}

TEST_F(IoTest, ConfidencePgm) {
  ScalarImage c(3, 2, 1);
  c.values() = {0.0, 1.0, 0.5, 0.25, 1.0 / 65535, 0.75};
  WriteConfidencePgm(Path("c.pgm"), c);
  const ScalarImage back = ReadConfidencePgm(Path("c.pgm"));
  ASSERT_EQ(back.width(), 3);
  for (std::size_t i = 0; i < c.values().size(); ++i) {
    EXPECT_NEAR(back.values()[i], c.values()[i], 0.5 / 65535);
  }
  std::ofstream(Path("bad.pgm")) << "P2\n1 1\n255\n0\n";
  EXPECT_THROW(ReadConfidencePgm(Path("bad.pgm")), FormatError);
}

TEST_F(IoTest, LabelsAndMasks) {
  LabelMap labels(3, 2);
  labels.labels = {0, 4, kUnknownLabel, 254, 1, 0};
  WriteLabelPng(Path("l.png"), labels);
  EXPECT_EQ(ReadLabelPng(Path("l.png")), labels);
  labels.labels[0] = 255;
  EXPECT_THROW(WriteLabelPng(Path("l2.png"), labels), FormatError);

  Mask m(4, 1);
  m.set(2, 0, true);
  WriteMaskPng(Path("m.png"), m);
  EXPECT_EQ(ReadMaskPng(Path("m.png")).values, m.values);
}

TEST_F(IoTest, ImagesScaleToUnitRange) {
  WritePng(Path("g8.png"), PngData{2, 1, 1, 8, false, {0, 255}});
  const ScalarImage g = ReadImage(Path("g8.png"));
  EXPECT_EQ(g.at(0, 0), 0.0);
  EXPECT_EQ(g.at(1, 0), 1.0);
  ScalarImage img(2, 2, 1);
  img.values() = {0.0, 0.2, 0.6, 1.0};
  WriteImagePng(Path("i.png"), img);
  const ScalarImage back = ReadImage(Path("i.png"));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(back.values()[i], img.values()[i], 1e-5);
}

}  // namespace
}  // namespace hd3
