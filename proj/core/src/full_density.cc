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

#include "hd3/full_density.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hd3 {

namespace {

// A residual displacement drawn from one pixel of one level, scaled by that
// pixel's phi weight at the output pixel.
struct Contribution {
  double weight = 0.0;
  std::vector<DensityAtom> atoms;
};

std::vector<DensityAtom> NonzeroCells(const MatchDensity& d, int x, int y) {
  std::vector<DensityAtom> out;
  const auto m = d.mass(x, y);
  for (int i = 0; i < static_cast<int>(m.size()); ++i) {
    if (m[i] <= 0.0) continue;
    out.push_back({{static_cast<double>(d.support().OffsetX(i)),
                    static_cast<double>(d.support().OffsetY(i))},
                   m[i]});
  }
  return out;
}

// Impulse response of phi^k: result[j] holds, for coarse pixel j, the
// weight it receives at every finest-level pixel.
std::vector<std::vector<double>> PhiWeights(int width, int height, int k) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < width * height; ++j) {
    MotionField impulse(width, height, FieldDim::kFlow);
    impulse.Set(j % width, j / width, {1.0, 0.0});
    for (int s = 0; s < k; ++s) impulse = UpsampleField(impulse);
    std::vector<double> w(impulse.size());
    for (int y = 0; y < impulse.height(); ++y) {
      for (int x = 0; x < impulse.width(); ++x) {
        w[impulse.Index(x, y)] = impulse.at(x, y).x;
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

bool AtomLess(const DensityAtom& a, const DensityAtom& b) {
  if (a.displacement.y != b.displacement.y) {
    return a.displacement.y < b.displacement.y;
  }
  return a.displacement.x < b.displacement.x;
}

double Hat(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

}  // namespace

FullDensity::FullDensity(int width, int height, FieldDim dim)
    : width_(width), height_(height), dim_(dim) {
  const auto n = static_cast<std::size_t>(width) * height;
  atoms_.resize(n);
  truncated_.assign(n, 0.0);
  valid_.assign(n, 1);
}

double FullDensity::RetainedMass(int x, int y) const {
  double s = 0.0;
  for (const auto& a : atoms(x, y)) s += a.mass;
  return s;
}

DensityAtom FullDensity::Mode(int x, int y) const {
  const auto& a = atoms(x, y);
  if (a.empty()) return {};
  return *std::max_element(a.begin(), a.end(),
                           [](const DensityAtom& p, const DensityAtom& q) {
                             return p.mass < q.mass;
                           });
}

double FullDensity::LatticeMass(int x, int y, int cx, int cy) const {
  double s = 0.0;
  for (const auto& a : atoms(x, y)) {
    const double wy = dim_ == FieldDim::kFlow ? Hat(a.displacement.y - cy)
                                              : (cy == 0 ? 1.0 : 0.0);
    if (wy == 0.0) continue;
    s += a.mass * Hat(a.displacement.x - cx) * wy;
  }
  return s;
}

FullDensity ComposeFullDensity(std::span<const MatchDensity> levels,
                               const FullDensityOptions& options) {
  if (levels.empty()) throw std::invalid_argument("full density: no levels");
  const FieldDim dim = levels.front().support().dim;
  for (std::size_t l = 1; l < levels.size(); ++l) {
    if (levels[l].width() != 2 * levels[l - 1].width() ||
        levels[l].height() != 2 * levels[l - 1].height()) {
      throw std::invalid_argument("full density: level " + std::to_string(l) +
                                  " is not twice the size of its parent");
    }
    if (levels[l].support().dim != dim) {
      throw std::invalid_argument("full density: mixed support dimensions");
    }
  }

  const MatchDensity& finest = levels.back();
  const int L = static_cast<int>(levels.size()) - 1;
  std::vector<std::vector<std::vector<double>>> phi(levels.size());
  for (int l = 0; l <= L; ++l) {
    phi[l] = PhiWeights(levels[l].width(), levels[l].height(), L - l);
  }

  FullDensity out(finest.width(), finest.height(), dim);
  for (int y = 0; y < finest.height(); ++y) {
    for (int x = 0; x < finest.width(); ++x) {
      const std::size_t px = out.Pixel(x, y);
      std::vector<Contribution> terms;
      bool ok = true;
      double paths = 1.0;
      for (int l = 0; l <= L && ok; ++l) {
        const MatchDensity& d = levels[l];
        for (int j = 0; j < d.width() * d.height(); ++j) {
          const double w = phi[l][j][px];
          if (w == 0.0) continue;
          const int jx = j % d.width();
          const int jy = j / d.width();
          if (!d.valid(jx, jy)) {
            ok = false;
            break;
          }
          Contribution c{w, NonzeroCells(d, jx, jy)};
          paths *= static_cast<double>(c.atoms.size());
          terms.push_back(std::move(c));
        }
      }
      if (!ok) {
        out.valid_[px] = 0;
        continue;
      }
      if (paths > static_cast<double>(options.max_paths)) {
        throw std::length_error(
            "full density: pixel (" + std::to_string(x) + "," +
            std::to_string(y) + ") needs " + std::to_string(paths) +
            " paths, budget is " + std::to_string(options.max_paths));
      }

      std::vector<DensityAtom> partial = {{{0.0, 0.0}, 1.0}};
      for (const Contribution& c : terms) {
        std::vector<DensityAtom> next;
        next.reserve(partial.size() * c.atoms.size());
        for (const auto& p : partial) {
          for (const auto& a : c.atoms) {
            next.push_back({p.displacement + c.weight * a.displacement,
                            p.mass * a.mass});
          }
        }
        partial = std::move(next);
      }

      std::sort(partial.begin(), partial.end(), AtomLess);
      std::vector<DensityAtom>& kept = out.atoms_[px];
      double truncated = 0.0;
      for (const auto& p : partial) {
        if (std::abs(p.displacement.x) > options.max_displacement ||
            std::abs(p.displacement.y) > options.max_displacement) {
          truncated += p.mass;
        } else if (!kept.empty() && kept.back().displacement == p.displacement) {
          kept.back().mass += p.mass;
        } else {
          kept.push_back(p);
        }
      }
      out.truncated_[px] = truncated;
    }
  }
  return out;
}

double LogLikelihood(const FullDensity& density, const MotionField& gt) {
  if (density.width() != gt.width() || density.height() != gt.height()) {
    throw std::invalid_argument("log likelihood: size mismatch");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!gt.valid(x, y) || !density.valid(x, y)) continue;
      Vec2 g = gt.at(x, y);
      if (density.dim() == FieldDim::kStereo) g.y = 0.0;
      double q = 0.0;
      for (const auto& t : BilinearTaps(g.x, g.y)) {
        if (t.weight != 0.0) q += t.weight * density.LatticeMass(x, y, t.x, t.y);
      }
      total += std::log(std::max(q, kProbabilityFloor));
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace hd3
