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

// File formats: Middlebury .flo, KITTI 16-bit flow and disparity PNGs,
// 16-bit PGM confidence maps, and plain 8/16-bit images and label maps.
//
// Stereo fields hold the horizontal displacement from the left to the right
// image, which is minus the disparity. The disparity PNG functions convert.

#ifndef HD3_IO_H_
#define HD3_IO_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hd3/field.h"
#include "hd3/propagation.h"

namespace hd3 {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Middlebury .flo: "PIEH", little-endian int32 width and height, then
// row-major interleaved little-endian float32 (u, v). Invalid pixels are
// written as 1e10 and any component above 1e9 in magnitude reads back as
// invalid. Stereo fields are written with v = 0 and always read back as flow.
inline constexpr float kFloUnknown = 1e10f;
void WriteFlo(const std::filesystem::path& path, const MotionField& field);
MotionField ReadFlo(const std::filesystem::path& path);
std::vector<std::uint8_t> EncodeFlo(const MotionField& field);
MotionField DecodeFlo(const std::vector<std::uint8_t>& bytes);

// KITTI flow: 16-bit RGB, channel = value * 64 + 2^15, blue = validity.
std::array<std::uint16_t, 3> EncodeKittiFlow(Vec2 v, bool valid);
void WriteKittiFlow(const std::filesystem::path& path, const MotionField& field);
MotionField ReadKittiFlow(const std::filesystem::path& path);

// KITTI disparity: 16-bit gray, raw = disparity * 256, 0 marks invalid.
std::uint16_t EncodeKittiDisparity(double disparity);
void WriteKittiDisparity(const std::filesystem::path& path,
                         const MotionField& stereo);
MotionField ReadKittiDisparity(const std::filesystem::path& path);

// Raw PNG samples, row-major and interleaved. Palette images keep their
// indices.
struct PngData {
  int width = 0;
  int height = 0;
  int channels = 1;
  int bit_depth = 8;
  bool palette = false;
  std::vector<std::uint16_t> samples;
};
PngData ReadPng(const std::filesystem::path& path);
void WritePng(const std::filesystem::path& path, const PngData& png);

// 8- or 16-bit PNG or binary PGM, scaled to [0, 1] per channel.
ScalarImage ReadImage(const std::filesystem::path& path);
// 16-bit PNG of values clamped to [0, 1].
void WriteImagePng(const std::filesystem::path& path, const ScalarImage& image);

// Single-channel [0, 1] image as binary 16-bit PGM scaled by 65535.
void WriteConfidencePgm(const std::filesystem::path& path,
                        const ScalarImage& confidence);
ScalarImage ReadConfidencePgm(const std::filesystem::path& path);

// 8-bit label maps: gray or palette PNG, index 255 means unknown.
inline constexpr int kLabelUnknownIndex = 255;
LabelMap ReadLabelPng(const std::filesystem::path& path);
void WriteLabelPng(const std::filesystem::path& path, const LabelMap& labels);

// Nonzero pixels of an 8/16-bit gray PNG.
Mask ReadMaskPng(const std::filesystem::path& path);
void WriteMaskPng(const std::filesystem::path& path, const Mask& mask);

// Dispatches on extension: .flo, or .png read as KITTI flow (or as KITTI
// disparity when disparity is set).
MotionField ReadField(const std::filesystem::path& path, bool disparity = false);
void WriteField(const std::filesystem::path& path, const MotionField& field);

}  // namespace hd3

#endif  // HD3_IO_H_
