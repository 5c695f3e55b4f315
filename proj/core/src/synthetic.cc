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

#include "hd3/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hd3 {

namespace {

ScalarImage Crop(const ScalarImage& src, int x0, int y0, int w, int h) {
  ScalarImage out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = src.at(x + x0, y + y0);
  }
  return out;
}

SyntheticPair MakePair(int width, int height, int fx, int fy,
                       std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("empty image");
  // frame1(x) = canvas(x + o1), frame2(y) = canvas(y + o2), flow = o1 - o2.
  const int o1x = std::max(fx, 0), o2x = std::max(-fx, 0);
  const int o1y = std::max(fy, 0), o2y = std::max(-fy, 0);
  const ScalarImage canvas =
      RandomTexture(width + std::abs(fx), height + std::abs(fy), seed);
  SyntheticPair p;
  p.frame1 = Crop(canvas, o1x, o1y, width, height);
  p.frame2 = Crop(canvas, o2x, o2y, width, height);
  p.truth = MotionField::Constant(width, height,
                                  FieldDim::kFlow,
                                  {static_cast<double>(fx), static_cast<double>(fy)});
  p.overlap = Mask(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int tx = x + fx;
      const int ty = y + fy;
      p.overlap.set(x, y, tx >= 0 && ty >= 0 && tx < width && ty < height);
    }
  }
  p.noc = p.overlap;
  return p;
}

}  // namespace

ScalarImage RandomTexture(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ScalarImage out(width, height, 1);
  double total_weight = 0.0;
  // Octaves with cell sizes 1, 2, 4 and 8 px, bilinearly interpolated.
  for (int cell : {1, 2, 4, 8}) {
    const double weight = std::sqrt(static_cast<double>(cell));
    total_weight += weight;
    const int gw = width / cell + 2;
    const int gh = height / cell + 2;
    std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
    for (double& g : grid) g = uni(rng);
    for (int y = 0; y < height; ++y) {
      const double gy = static_cast<double>(y) / cell;
      const int y0 = static_cast<int>(gy);
      const double ay = gy - y0;
      for (int x = 0; x < width; ++x) {
        const double gx = static_cast<double>(x) / cell;
        const int x0 = static_cast<int>(gx);
        const double ax = gx - x0;
        const auto g = [&](int i, int j) {
          return grid[static_cast<std::size_t>(j) * gw + i];
        };
        const double v = (1 - ax) * (1 - ay) * g(x0, y0) + ax * (1 - ay) * g(x0 + 1, y0) +
                         (1 - ax) * ay * g(x0, y0 + 1) + ax * ay * g(x0 + 1, y0 + 1);
        out.at(x, y) += weight * v;
      }
    }
  }
  for (double& v : out.values()) v /= total_weight;
  return out;
}

SyntheticPair TranslatedPair(int width, int height, int shift_x, int shift_y,
                             std::uint64_t seed) {
  return MakePair(width, height, shift_x, shift_y, seed);
}

SyntheticPair StereoPair(int width, int height, int disparity,
                         std::uint64_t seed) {
  SyntheticPair p = MakePair(width, height, -disparity, 0, seed);
  MotionField stereo(width, height, FieldDim::kStereo);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) stereo.Set(x, y, p.truth.at(x, y));
  }
  p.truth = std::move(stereo);
  return p;
}

void DestroyBand(SyntheticPair& pair, int x_begin, int x_end,
                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int w = pair.frame2.width();
  const int h = pair.frame2.height();
  x_begin = std::clamp(x_begin, 0, w);
  x_end = std::clamp(x_end, x_begin, w);
  for (int y = 0; y < h; ++y) {
    for (int x = x_begin; x < x_end; ++x) pair.frame2.at(x, y) = uni(rng);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec2 f = pair.truth.at(x, y);
      const int tx = x + static_cast<int>(std::lround(f.x));
      if (tx >= x_begin && tx < x_end) pair.noc.set(x, y, false);
    }
  }
}

Mask Erode(const Mask& mask, int margin) {
  Mask out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      bool keep = mask.at(x, y);
      for (int dy = -margin; dy <= margin && keep; ++dy) {
        for (int dx = -margin; dx <= margin && keep; ++dx) {
          const int sx = x + dx;
          const int sy = y + dy;
          keep = sx >= 0 && sy >= 0 && sx < mask.width && sy < mask.height &&
                 mask.at(sx, sy);
        }
      }
      out.set(x, y, keep);
    }
  }
  return out;
}

}  // namespace hd3
