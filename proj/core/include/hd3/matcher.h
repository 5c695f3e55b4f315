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

// Coarse-to-fine probabilistic matcher.
//
// At every pyramid level the frame-2 descriptors are sampled around each
// pixel's upsampled running estimate, giving a bounded cost volume. A small
// quadratic penalty on the residual and a box aggregation of the costs stand
// in for a learned decoder; a softmax over negated costs then gives the
// residual match density for that level. Its local expectation is added to
// the running estimate, which is upsampled for the next level.

#ifndef HD3_MATCHER_H_
#define HD3_MATCHER_H_

#include <span>
#include <vector>

#include "hd3/density.h"
#include "hd3/features.h"
#include "hd3/field.h"

namespace hd3 {

enum class MatchMode { kFlow, kStereo };

// Sign every stereo point estimate is clipped to.
enum class DisparitySign { kNonPositive, kNonNegative };

struct MatchConfig {
  MatchMode mode = MatchMode::kFlow;
  int levels = 5;
  // Support radius of every level's residual density.
  int range = 4;
  // Softmax temperature on [0, 1] census costs. Default fitted by minimizing
  // the summed per-level KL loss on synthetic translations.
  double tau = 0.06;
  // Added to the cost of residual d as residual_penalty * |d|^2.
  double residual_penalty = 0.02;
  // Costs are averaged over a (2r+1)^2 box of pixels; 0 disables.
  int aggregation_radius = 1;
  DisparitySign stereo_sign = DisparitySign::kNonPositive;

  static MatchConfig Flow() { return {}; }
  static MatchConfig Stereo() {
    MatchConfig c;
    c.mode = MatchMode::kStereo;
    c.levels = 6;
    return c;
  }

  FieldDim dim() const {
    return mode == MatchMode::kFlow ? FieldDim::kFlow : FieldDim::kStereo;
  }
  Support support() const { return {range, dim()}; }

  // Throws std::invalid_argument on levels < 1, range < 1, tau <= 0, or a
  // negative penalty or aggregation radius.
  void Validate() const;
};

// Matching costs per pixel over a support, laid out like MatchDensity mass.
struct CostVolume {
  int width = 0;
  int height = 0;
  Support support;
  std::vector<double> costs;

  std::span<const double> at(int x, int y) const {
    return {costs.data() + Offset(x, y), static_cast<std::size_t>(support.size())};
  }
  std::span<double> at(int x, int y) {
    return {costs.data() + Offset(x, y), static_cast<std::size_t>(support.size())};
  }

 private:
  std::size_t Offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * support.size();
  }
};

struct LevelOutput {
  MatchDensity residual_density;
  // Residual actually applied at this level: the local expectation of
  // residual_density, except where the stereo sign clip moved the running
  // estimate.
  MotionField residual_field;
  // prior + residual_field, with prior = phi(running field one level up).
  MotionField running_field;
  ScalarImage confidence;
};

struct MatchResult {
  MotionField field;
  ScalarImage confidence;
  std::vector<LevelOutput> levels;
};

// cost(x, d) = census distance between F1(x) and F2 sampled bilinearly at
// x + prior(x) + d. Bilinear sampling of a binary descriptor is scored as the
// tap-weighted distance, which equals the L1 distance to the bilinearly
// interpolated bit vector. Samples within the image footprint
// [-0.5, size - 0.5] are clamped to the border pixels; samples beyond it and
// pixels with an invalid prior cost 1.
CostVolume ComputeCostVolume(const DescriptorImage& f1,
                             const DescriptorImage& f2,
                             const MotionField& prior, const Support& support);

// cost(x, d) += penalty * |d|^2.
void AddResidualPenalty(CostVolume& costs, double penalty);

// Mean of each cost over the in-image pixels of a (2r+1)^2 box.
CostVolume AggregateCosts(const CostVolume& costs, int radius);

// mass(d) proportional to exp(-cost(d) / tau).
MatchDensity SoftmaxDensity(const CostVolume& costs, double tau);

class Matcher {
 public:
  explicit Matcher(MatchConfig config);

  const MatchConfig& config() const { return config_; }

  // Throws std::invalid_argument when the descriptor images and prior differ
  // in size.
  LevelOutput MatchLevel(const DescriptorImage& f1, const DescriptorImage& f2,
                         const MotionField& prior) const;

  MatchResult Match(const FeaturePyramid& p1, const FeaturePyramid& p2) const;

  // Throws std::invalid_argument on mismatched sizes or sizes the pyramid
  // cannot be built from.
  MatchResult Match(const ScalarImage& i1, const ScalarImage& i2) const;

 private:
  MatchConfig config_;
};

// Per-level KL loss of the predicted residual densities against ground
// truth. The ground truth is downsampled to each level, the upsampled
// running estimate of the level above is subtracted, and the residual is
// splatted onto the level's support. outputs[0] is the coarsest level and
// the last level is at gt's resolution.
std::vector<double> EvaluateLevels(const MotionField& gt,
                                   std::span<const LevelOutput> outputs,
                                   const MatchConfig& config);

// Per-level outputs that a perfect matcher would produce for gt: residual
// densities are splats of the ground-truth residuals. Residuals outside the
// support leave their pixels invalid.
std::vector<LevelOutput> DecomposeGroundTruth(const MotionField& gt,
                                              const MatchConfig& config);

}  // namespace hd3

#endif  // HD3_MATCHER_H_
