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

// Exact recovery of the full per-pixel match density from a stack of
// per-level residual densities, by enumerating every coarse-to-fine
// combination of residual displacements.
//
// The composed displacement at a finest-level pixel is
//   f(x) = sum_l sum_j w_{l,j}(x) * g^l_j
// where w_{l,j}(x) are the weights of phi^(L-l) from level-l pixel j onto x
// (including the 2^(L-l) magnitude factor), and each g^l_j is drawn
// independently from the level-l density at pixel j. This is the same linear
// map that ComposePointEstimates applies to point estimates, so a stack of
// delta densities composes to exactly one atom at the composed point
// estimate.
//
// The number of paths grows as the product of the atom counts of every
// contributing pixel; this is meant for tiny grids only and refuses to run
// past its path budget.

#ifndef HD3_FULL_DENSITY_H_
#define HD3_FULL_DENSITY_H_

#include <cstddef>
#include <span>
#include <vector>

#include "hd3/density.h"
#include "hd3/field.h"

namespace hd3 {

struct DensityAtom {
  Vec2 displacement;
  double mass = 0.0;
};

struct FullDensityOptions {
  // Paths whose composed displacement has a component beyond this bound are
  // dropped and their mass reported as truncated.
  double max_displacement = 64.0;
  // Upper bound on enumerated paths per pixel; exceeding it throws.
  std::size_t max_paths = std::size_t{1} << 20;
};

class FullDensity {
 public:
  FullDensity() = default;
  FullDensity(int width, int height, FieldDim dim);

  int width() const { return width_; }
  int height() const { return height_; }
  FieldDim dim() const { return dim_; }

  // Atoms sorted by (displacement.y, displacement.x); equal displacements are
  // merged.
  const std::vector<DensityAtom>& atoms(int x, int y) const {
    return atoms_[Pixel(x, y)];
  }
  double truncated_mass(int x, int y) const { return truncated_[Pixel(x, y)]; }
  bool valid(int x, int y) const { return valid_[Pixel(x, y)] != 0; }

  double RetainedMass(int x, int y) const;
  // Heaviest atom; ties go to the first in sorted order.
  DensityAtom Mode(int x, int y) const;

  // Mass on integer lattice cell (cx, cy) after splatting every atom
  // bilinearly onto the lattice. Atoms already on the lattice keep their
  // mass on their own cell.
  double LatticeMass(int x, int y, int cx, int cy) const;

 private:
  friend FullDensity ComposeFullDensity(std::span<const MatchDensity>,
                                        const FullDensityOptions&);

  std::size_t Pixel(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  FieldDim dim_ = FieldDim::kFlow;
  std::vector<std::vector<DensityAtom>> atoms_;
  std::vector<double> truncated_;
  std::vector<std::uint8_t> valid_;
};

// levels[0] is the coarsest level; every level is twice the size of the one
// before and all share one support dimension. A finest-level pixel is
// invalid when any pixel it draws from is invalid.
//
// Throws std::invalid_argument on inconsistent level sizes and
// std::length_error when a pixel needs more than options.max_paths paths.
FullDensity ComposeFullDensity(std::span<const MatchDensity> levels,
                               const FullDensityOptions& options = {});

// Mean over pixels valid in both of log q(x), where q is the lattice mass
// around f_gt(x) weighted by f_gt's bilinear weights, floored at
// kProbabilityFloor. Returns 0 when no pixel qualifies.
double LogLikelihood(const FullDensity& density, const MotionField& gt);

}  // namespace hd3

#endif  // HD3_FULL_DENSITY_H_
