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

// Discrete match densities and the conversions between densities and
// displacement vectors.
//
// A match density assigns every pixel a probability mass function over a
// bounded grid of integer displacements (the support). Vectors become
// densities by splatting bilinear weights onto the 2x2 (2x1 for stereo)
// integer window containing them (VectorToDensity); densities become vectors
// by taking the expectation inside the window of largest mass
// (DensityToVector).

#ifndef HD3_DENSITY_H_
#define HD3_DENSITY_H_

#include <optional>
#include <span>
#include <vector>

#include "hd3/field.h"

namespace hd3 {

// Integer displacement grid [-radius, radius]^2 for flow, or the horizontal
// line [-radius, radius] for stereo. Cells are indexed row-major, dy outer.
struct Support {
  int radius = 4;
  FieldDim dim = FieldDim::kFlow;

  int side() const { return 2 * radius + 1; }
  int rows() const { return dim == FieldDim::kFlow ? side() : 1; }
  int size() const { return side() * rows(); }
  bool is_flow() const { return dim == FieldDim::kFlow; }

  bool Contains(int dx, int dy) const;
  int Index(int dx, int dy) const {
    return (is_flow() ? dy + radius : 0) * side() + dx + radius;
  }
  int OffsetX(int index) const { return index % side() - radius; }
  int OffsetY(int index) const {
    return is_flow() ? index / side() - radius : 0;
  }

  friend bool operator==(const Support&, const Support&) = default;
};

// A 2x2 (flow) or 2x1 (stereo) block of support cells, identified by its
// minimum corner.
struct SupportWindow {
  int anchor_x = 0;
  int anchor_y = 0;

  friend bool operator==(const SupportWindow&, const SupportWindow&) = default;
};

class MatchDensity {
 public:
  MatchDensity() = default;
  MatchDensity(int width, int height, Support support);

  int width() const { return width_; }
  int height() const { return height_; }
  const Support& support() const { return support_; }

  std::span<const double> mass(int x, int y) const {
    return {masses_.data() + Offset(x, y),
            static_cast<std::size_t>(support_.size())};
  }
  std::span<double> mass(int x, int y) {
    return {masses_.data() + Offset(x, y),
            static_cast<std::size_t>(support_.size())};
  }
  bool valid(int x, int y) const { return valid_[Pixel(x, y)] != 0; }
  void SetValid(int x, int y, bool v) { valid_[Pixel(x, y)] = v ? 1 : 0; }

  // Zeroes the pixel's mass and flags it invalid.
  void Invalidate(int x, int y);

 private:
  std::size_t Pixel(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  std::size_t Offset(int x, int y) const {
    return Pixel(x, y) * static_cast<std::size_t>(support_.size());
  }

  int width_ = 0;
  int height_ = 0;
  Support support_;
  std::vector<double> masses_;
  std::vector<std::uint8_t> valid_;
};

// Floor applied to predicted probabilities before taking logarithms.
inline constexpr double kProbabilityFloor = 1e-12;

// Writes the bilinear splat of d into out (support.size() entries). Returns
// false, leaving out zeroed, when d lies outside the support's hull.
bool SplatVector(Vec2 d, const Support& support, std::span<double> out);

// Per-pixel SplatVector. Pixels whose displacement is out of range, or
// invalid in the field, are invalid in the result.
MatchDensity VectorToDensity(const MotionField& field, const Support& support);

// Window of maximal total mass; ties go to the smallest anchor in row-major
// (anchor_y, then anchor_x) order.
SupportWindow SelectWindow(std::span<const double> mass, const Support& support);
std::vector<SupportWindow> SelectWindows(const MatchDensity& density);

double WindowMass(std::span<const double> mass, const Support& support,
                  SupportWindow window);

// Local expectation: the mean displacement under the density restricted to
// its best window and renormalized. Empty when that window holds no mass.
std::optional<Vec2> LocalExpectation(std::span<const double> mass,
                                     const Support& support);
MotionField DensityToVector(const MatchDensity& density);

// Mean over pixels valid in both densities of KL(gt || predicted), in nats.
// Cells where gt has no mass contribute nothing; predicted mass is floored at
// kProbabilityFloor. Returns 0 when no pixel is valid.
double KlLoss(const MatchDensity& gt, const MatchDensity& predicted);

// Mass inside the best window per pixel; 0 for invalid pixels. Uncertainty is
// 1 - confidence.
ScalarImage ConfidenceMap(const MatchDensity& density);

// f = sum_l phi^(L-l)(g^l), evaluated coarse to fine as f <- phi(f) + g^l.
// residuals[0] is the coarsest level; each level must be exactly twice the
// size of the previous one.
MotionField ComposePointEstimates(std::span<const MotionField> residuals);

}  // namespace hd3

#endif  // HD3_DENSITY_H_
