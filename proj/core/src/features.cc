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

#include "hd3/features.h"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace hd3 {

ScalarImage ToGrayscale(const ScalarImage& image) {
  if (image.channels() == 1) return image;
  ScalarImage gray(image.width(), image.height(), 1);
  const int c = image.channels();
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      double v = 0.0;
      if (c >= 3) {
        v = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
            0.114 * image.at(x, y, 2);
      } else {
        for (int k = 0; k < c; ++k) v += image.at(x, y, k);
        v /= c;
      }
      gray.at(x, y) = v;
    }
  }
  return gray;
}

ScalarImage PyramidDown(const ScalarImage& gray) {
  static constexpr double kKernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16,
                                        4.0 / 16, 1.0 / 16};
  const int w = gray.width();
  const int h = gray.height();
  ScalarImage rows(w / 2, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w / 2; ++x) {
      double s = 0.0;
      for (int k = -2; k <= 2; ++k) {
        s += kKernel[k + 2] * gray.at(std::clamp(2 * x + k, 0, w - 1), y);
      }
      rows.at(x, y) = s;
    }
  }
  ScalarImage out(w / 2, h / 2, 1);
  for (int y = 0; y < h / 2; ++y) {
    for (int x = 0; x < w / 2; ++x) {
      double s = 0.0;
      for (int k = -2; k <= 2; ++k) {
        s += kKernel[k + 2] * rows.at(x, std::clamp(2 * y + k, 0, h - 1));
      }
      out.at(x, y) = s;
    }
  }
  return out;
}

DescriptorImage CensusTransform(const ScalarImage& gray) {
  const int w = gray.width();
  const int h = gray.height();
  DescriptorImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double center = gray.at(x, y);
      CensusBits bits = 0;
      CensusBits mask = 0;
      int bit = 0;
      for (int dy = -kCensusHalfHeight; dy <= kCensusHalfHeight; ++dy) {
        const int sy = y + dy;
        for (int dx = -kCensusHalfWidth; dx <= kCensusHalfWidth; ++dx, ++bit) {
          const int sx = x + dx;
          if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
          mask |= CensusBits{1} << bit;
          if (gray.at(sx, sy) < center) bits |= CensusBits{1} << bit;
        }
      }
      out.at(x, y) = bits;
      out.mask(x, y) = mask;
    }
  }
  return out;
}

FeaturePyramid BuildPyramid(const ScalarImage& image, int levels) {
  if (levels < 1) throw std::invalid_argument("pyramid needs at least 1 level");
  const int scale = 1 << (levels - 1);
  if (image.width() % scale != 0 || image.height() % scale != 0) {
    throw std::invalid_argument(
        "image size " + std::to_string(image.width()) + "x" +
        std::to_string(image.height()) + " is not divisible by " +
        std::to_string(scale));
  }
  if (image.width() / scale < kMinPyramidSide ||
      image.height() / scale < kMinPyramidSide) {
    throw std::invalid_argument("image too small for " +
                                std::to_string(levels) + " pyramid levels");
  }

  FeaturePyramid p;
  p.images.resize(levels);
  p.levels.resize(levels);
  p.images[levels - 1] = ToGrayscale(image);
  for (int l = levels - 2; l >= 0; --l) {
    p.images[l] = PyramidDown(p.images[l + 1]);
  }
  for (int l = 0; l < levels; ++l) p.levels[l] = CensusTransform(p.images[l]);
  return p;
}

double MatchCost(CensusBits a, CensusBits b) {
  return static_cast<double>(std::popcount((a ^ b) & kCensusFullMask)) /
         kCensusBits;
}

double MatchCost(Descriptor a, Descriptor b) {
  if (!a.valid || !b.valid) return 1.0;
  const CensusBits shared = a.mask & b.mask & kCensusFullMask;
  const int n = std::popcount(shared);
  if (n == 0) return 1.0;
  return static_cast<double>(std::popcount((a.bits ^ b.bits) & shared)) / n;
}

}  // namespace hd3
