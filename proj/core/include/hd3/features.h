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

// Fixed multi-scale features: a Gaussian x2 image pyramid with a census
// descriptor per pixel at every level.

#ifndef HD3_FEATURES_H_
#define HD3_FEATURES_H_

#include <cstdint>
#include <vector>

#include "hd3/field.h"

namespace hd3 {

// Census window is 9 wide by 7 tall: 63 comparisons fit one 64-bit word.
// Bit (dy + 3) * 9 + (dx + 4) is set when the neighbor at (dx, dy) is
// strictly darker than the center; the center's own bit is always clear.
inline constexpr int kCensusHalfWidth = 4;
inline constexpr int kCensusHalfHeight = 3;
inline constexpr int kCensusBits = 63;

using CensusBits = std::uint64_t;
inline constexpr CensusBits kCensusFullMask = (CensusBits{1} << kCensusBits) - 1;

// A census word plus the mask of comparisons it actually holds. Near the
// image border, neighbors outside the image are left out of the mask rather
// than replaced by clamped samples.
struct Descriptor {
  CensusBits bits = 0;
  CensusBits mask = kCensusFullMask;
  bool valid = true;
};

class DescriptorImage {
 public:
  DescriptorImage() = default;
  DescriptorImage(int width, int height)
      : width_(width), height_(height),
        bits_(static_cast<std::size_t>(width) * height, 0),
        masks_(static_cast<std::size_t>(width) * height, kCensusFullMask) {}

  int width() const { return width_; }
  int height() const { return height_; }
  CensusBits at(int x, int y) const { return bits_[Index(x, y)]; }
  CensusBits& at(int x, int y) { return bits_[Index(x, y)]; }
  CensusBits mask(int x, int y) const { return masks_[Index(x, y)]; }
  CensusBits& mask(int x, int y) { return masks_[Index(x, y)]; }

  // Descriptor at (x, y), flagged invalid outside the image.
  Descriptor Sample(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return {0, 0, false};
    return {at(x, y), mask(x, y), true};
  }

 private:
  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<CensusBits> bits_;
  std::vector<CensusBits> masks_;
};

// levels[0] is the coarsest; level l has the input size divided by
// 2^(levels - 1 - l), so the last level is at input resolution.
struct FeaturePyramid {
  std::vector<ScalarImage> images;
  std::vector<DescriptorImage> levels;

  int size() const { return static_cast<int>(levels.size()); }
};

inline constexpr int kMinPyramidSide = 8;

// Rec. 601 luma for 3- or 4-channel input, channel mean otherwise.
ScalarImage ToGrayscale(const ScalarImage& image);

// 5-tap binomial blur with clamped borders, then keep every second sample.
ScalarImage PyramidDown(const ScalarImage& gray);

// Census transform. Border pixels only compare against neighbors inside the
// image and carry a reduced mask.
DescriptorImage CensusTransform(const ScalarImage& gray);

// Throws std::invalid_argument when levels < 1, when the size is not
// divisible by 2^(levels - 1), or when the coarsest level would be smaller
// than kMinPyramidSide on either side.
FeaturePyramid BuildPyramid(const ScalarImage& image, int levels);

// Hamming distance over the comparisons both descriptors hold, divided by
// their count; 1 when either side is invalid or they share no comparison.
// For two interior descriptors this is the plain 63-bit normalized distance.
double MatchCost(Descriptor a, Descriptor b);
// Normalized Hamming distance over all 63 bits.
double MatchCost(CensusBits a, CensusBits b);

}  // namespace hd3

#endif  // HD3_FEATURES_H_
