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

// Seeded synthetic image pairs with known motion, for tests, benchmarks and
// the CLI's synth command.

#ifndef HD3_SYNTHETIC_H_
#define HD3_SYNTHETIC_H_

#include <cstdint>

#include "hd3/field.h"

namespace hd3 {

// Multi-octave value noise in [0, 1].
ScalarImage RandomTexture(int width, int height, std::uint64_t seed);

struct SyntheticPair {
  ScalarImage frame1;
  ScalarImage frame2;
  MotionField truth;  // frame1 -> frame2, valid everywhere
  Mask overlap;       // pixels whose match lies inside frame2
  Mask noc;           // overlap minus pixels matched into a destroyed band
};

// frame1(x) = frame2(x + shift) for an integer shift.
SyntheticPair TranslatedPair(int width, int height, int shift_x, int shift_y,
                             std::uint64_t seed);

// Rectified pair with constant disparity: frame2(x - disparity) = frame1(x),
// truth is the stereo field -disparity.
SyntheticPair StereoPair(int width, int height, int disparity,
                         std::uint64_t seed);

// Replaces columns [x_begin, x_end) of frame2 with independent noise and
// drops pixels matched into them from noc.
void DestroyBand(SyntheticPair& pair, int x_begin, int x_end,
                 std::uint64_t seed);

// Pixels whose (2 * margin + 1)^2 neighborhood lies inside the image and the
// mask.
Mask Erode(const Mask& mask, int margin);

}  // namespace hd3

#endif  // HD3_SYNTHETIC_H_
