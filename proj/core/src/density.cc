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

#include "hd3/density.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hd3 {

bool Support::Contains(int dx, int dy) const {
  if (dx < -radius || dx > radius) return false;
  if (!is_flow()) return dy == 0;
  return dy >= -radius && dy <= radius;
}

MatchDensity::MatchDensity(int width, int height, Support support)
    : width_(width), height_(height), support_(support) {
  if (support.radius < 1) {
    throw std::invalid_argument("support radius must be at least 1");
  }
  const auto pixels = static_cast<std::size_t>(width) * height;
  masses_.assign(pixels * support.size(), 0.0);
  valid_.assign(pixels, 1);
}

void MatchDensity::Invalidate(int x, int y) {
  auto m = mass(x, y);
  std::fill(m.begin(), m.end(), 0.0);
  valid_[Pixel(x, y)] = 0;
}

namespace {

// Anchor and fractional offset of a coordinate inside the window that
// contains it, keeping the window on the support.
bool WindowCoordinate(double v, int radius, int* anchor, double* frac) {
  if (!std::isfinite(v) || v < -radius || v > radius) return false;
  const int a = std::min(static_cast<int>(std::floor(v)), radius - 1);
  *anchor = a;
  *frac = v - a;
  return true;
}

}  // namespace

bool SplatVector(Vec2 d, const Support& support, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  int ax = 0;
  double fx = 0.0;
  if (!WindowCoordinate(d.x, support.radius, &ax, &fx)) return false;
  if (!support.is_flow()) {
    out[support.Index(ax, 0)] = 1.0 - fx;
    out[support.Index(ax + 1, 0)] = fx;
    return true;
  }
  int ay = 0;
  double fy = 0.0;
  if (!WindowCoordinate(d.y, support.radius, &ay, &fy)) return false;
  out[support.Index(ax, ay)] = (1.0 - fx) * (1.0 - fy);
  out[support.Index(ax + 1, ay)] = fx * (1.0 - fy);
  out[support.Index(ax, ay + 1)] = (1.0 - fx) * fy;
  out[support.Index(ax + 1, ay + 1)] = fx * fy;
  return true;
}

MatchDensity VectorToDensity(const MotionField& field, const Support& support) {
  MatchDensity out(field.width(), field.height(), support);
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (!field.valid(x, y) || !SplatVector(field.at(x, y), support, out.mass(x, y))) {
        out.Invalidate(x, y);
      }
    }
  }
  return out;
}

double WindowMass(std::span<const double> mass, const Support& support,
                  SupportWindow w) {
  const int ax = w.anchor_x;
  const int ay = w.anchor_y;
  if (!support.is_flow()) {
    return mass[support.Index(ax, 0)] + mass[support.Index(ax + 1, 0)];
  }
  return mass[support.Index(ax, ay)] + mass[support.Index(ax + 1, ay)] +
         mass[support.Index(ax, ay + 1)] + mass[support.Index(ax + 1, ay + 1)];
}

SupportWindow SelectWindow(std::span<const double> mass, const Support& support) {
  const int r = support.radius;
  const int y_lo = support.is_flow() ? -r : 0;
  const int y_hi = support.is_flow() ? r - 1 : 0;
  SupportWindow best{-r, y_lo};
  double best_mass = -1.0;
  for (int ay = y_lo; ay <= y_hi; ++ay) {
    for (int ax = -r; ax <= r - 1; ++ax) {
      const double m = WindowMass(mass, support, {ax, ay});
      if (m > best_mass) {
        best_mass = m;
        best = {ax, ay};
      }
    }
  }
  return best;
}

std::vector<SupportWindow> SelectWindows(const MatchDensity& density) {
  std::vector<SupportWindow> out;
  out.reserve(static_cast<std::size_t>(density.width()) * density.height());
  for (int y = 0; y < density.height(); ++y) {
    for (int x = 0; x < density.width(); ++x) {
      out.push_back(SelectWindow(density.mass(x, y), density.support()));
    }
  }
  return out;
}

std::optional<Vec2> LocalExpectation(std::span<const double> mass,
                                     const Support& support) {
  const SupportWindow w = SelectWindow(mass, support);
  const int rows = support.is_flow() ? 2 : 1;
  double total = 0.0;
  Vec2 moment;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < 2; ++i) {
      const int dx = w.anchor_x + i;
      const int dy = w.anchor_y + j;
      const double m = mass[support.Index(dx, dy)];
      total += m;
      moment = moment + m * Vec2{static_cast<double>(dx), static_cast<double>(dy)};
    }
  }
  if (!(total > 0.0)) return std::nullopt;
  return (1.0 / total) * moment;
}

MotionField DensityToVector(const MatchDensity& density) {
  MotionField out(density.width(), density.height(), density.support().dim);
  for (int y = 0; y < density.height(); ++y) {
    for (int x = 0; x < density.width(); ++x) {
      std::optional<Vec2> e;
      if (density.valid(x, y)) {
        e = LocalExpectation(density.mass(x, y), density.support());
      }
      if (e) {
        out.Set(x, y, *e);
      } else {
        out.Invalidate(x, y);
      }
    }
  }
  return out;
}

double KlLoss(const MatchDensity& gt, const MatchDensity& predicted) {
  if (gt.width() != predicted.width() || gt.height() != predicted.height() ||
      !(gt.support() == predicted.support())) {
    throw std::invalid_argument("KL: density shape mismatch");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!gt.valid(x, y) || !predicted.valid(x, y)) continue;
      const auto p = gt.mass(x, y);
      const auto q = predicted.mass(x, y);
      double kl = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        kl += p[i] * (std::log(p[i]) - std::log(std::max(q[i], kProbabilityFloor)));
      }
      total += kl;
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

ScalarImage ConfidenceMap(const MatchDensity& density) {
  ScalarImage out(density.width(), density.height(), 1);
  for (int y = 0; y < density.height(); ++y) {
    for (int x = 0; x < density.width(); ++x) {
      if (!density.valid(x, y)) continue;
      const auto m = density.mass(x, y);
      const SupportWindow w = SelectWindow(m, density.support());
      out.at(x, y) = std::clamp(WindowMass(m, density.support(), w), 0.0, 1.0);
    }
  }
  return out;
}

MotionField ComposePointEstimates(std::span<const MotionField> residuals) {
  if (residuals.empty()) {
    throw std::invalid_argument("compose: no levels");
  }
  MotionField f = residuals.front();
  for (std::size_t l = 1; l < residuals.size(); ++l) {
    const MotionField& g = residuals[l];
    if (g.width() != 2 * f.width() || g.height() != 2 * f.height()) {
      throw std::invalid_argument("compose: level " + std::to_string(l) +
                                  " is not twice the size of level " +
                                  std::to_string(l - 1));
    }
    f = AddFields(UpsampleField(f), g);
  }
  return f;
}

}  // namespace hd3
