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

// Region propagation: class probability maps carried from frame to frame by
// forward splatting along point-estimate flow or along a match density.

#ifndef HD3_PROPAGATION_H_
#define HD3_PROPAGATION_H_

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hd3/density.h"
#include "hd3/field.h"
#include "hd3/matcher.h"

namespace hd3 {

inline constexpr int kUnknownLabel = -1;

struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  LabelMap() = default;
  LabelMap(int w, int h, int fill = kUnknownLabel)
      : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

  int at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  int& at(int x, int y) {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

// Per-pixel class distribution. Unknown pixels carry a uniform vector.
class LabelProbMap {
 public:
  LabelProbMap() = default;
  LabelProbMap(int width, int height, int classes);

  // One-hot vectors; kUnknownLabel pixels become unknown. Throws
  // std::invalid_argument on labels outside [0, classes).
  static LabelProbMap FromLabels(const LabelMap& labels, int classes);

  int width() const { return width_; }
  int height() const { return height_; }
  int classes() const { return classes_; }

  std::span<const double> probs(int x, int y) const {
    return {probs_.data() + Offset(x, y), static_cast<std::size_t>(classes_)};
  }
  std::span<double> probs(int x, int y) {
    return {probs_.data() + Offset(x, y), static_cast<std::size_t>(classes_)};
  }
  bool unknown(int x, int y) const { return unknown_[Pixel(x, y)] != 0; }
  void SetUnknown(int x, int y);
  void SetKnown(int x, int y) { unknown_[Pixel(x, y)] = 0; }

  const std::vector<double>& raw() const { return probs_; }
  friend bool operator==(const LabelProbMap&, const LabelProbMap&) = default;

 private:
  std::size_t Pixel(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  std::size_t Offset(int x, int y) const {
    return Pixel(x, y) * static_cast<std::size_t>(classes_);
  }

  int width_ = 0;
  int height_ = 0;
  int classes_ = 0;
  std::vector<double> probs_;
  std::vector<std::uint8_t> unknown_;
};

// Splat guide carrying a match density. Each support cell d of pixel x sends
// mass(d) to x + base(x) + d, bilinearly when base is fractional. Without a
// base the targets are the integer cells x + d.
struct DensityGuide {
  MatchDensity density;
  std::optional<MotionField> base;

  DensityGuide() = default;
  DensityGuide(MatchDensity d) : density(std::move(d)) {}  // NOLINT
  DensityGuide(MatchDensity d, MotionField b)
      : density(std::move(d)), base(std::move(b)) {}
};

using Guide = std::variant<MotionField, DensityGuide>;

// Unnormalized splat result.
struct SplatAccumulator {
  int width = 0;
  int height = 0;
  int classes = 0;
  std::vector<double> class_mass;  // width * height * classes
  std::vector<double> weight;      // width * height
  double emitted = 0.0;            // total splat weight leaving known sources
  double dropped = 0.0;            // part of it that left the image
};

// Known source pixels distribute their class vector to targets; unknown
// sources and invalid guide pixels emit nothing. Sources are visited in
// row-major order and their taps in row-major cell order, so the result is
// deterministic.
SplatAccumulator AccumulateSplat(const LabelProbMap& source, const Guide& guide);

// Divides each target's class mass by its received weight. Targets that
// received nothing become unknown.
LabelProbMap NormalizeSplat(const SplatAccumulator& acc);

LabelProbMap SplatForward(const LabelProbMap& source, const Guide& guide);

// Frame t = SplatForward(frame t-1, guides[t-1]); returns one map per guide.
std::vector<LabelProbMap> PropagateSequence(const LabelProbMap& seed,
                                            std::span<const Guide> guides);

// Argmax per pixel (lowest class index on ties); unknown pixels map to
// kUnknownLabel.
LabelMap HardLabels(const LabelProbMap& map);

struct SegmentationScore {
  double mean_iou = 0.0;  // percent
  double mean_acc = 0.0;  // percent
  int classes_present = 0;
};

// Per-class IoU and accuracy averaged over classes present in gt. Pixels
// unknown in either map are ignored. Throws std::invalid_argument when gt has
// no labeled pixel in the scored region or sizes differ.
SegmentationScore ScoreSegmentation(const LabelMap& predicted,
                                    const LabelMap& truth, int classes);

// Guides derived from a matcher run: the point estimate, or the last level's
// residual density anchored at that level's prior.
MotionField VectorGuide(const MatchResult& match);
DensityGuide ProbabilisticGuide(const MatchResult& match);

}  // namespace hd3

#endif  // HD3_PROPAGATION_H_
