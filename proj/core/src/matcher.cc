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

#include "hd3/matcher.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hd3 {

namespace {

// Tap-weighted census cost of a against f2 sampled bilinearly at (px, py).
// Positions inside the image footprint [-0.5, size - 0.5] are clamped to the
// outermost pixel centers; anything beyond costs 1.
double SampledCost(const Descriptor& a, const DescriptorImage& f2, double px,
                   double py) {
  const double w = f2.width();
  const double h = f2.height();
  if (!(px >= -0.5 && py >= -0.5 && px <= w - 0.5 && py <= h - 0.5)) return 1.0;
  const auto taps =
      BilinearTaps(std::clamp(px, 0.0, w - 1.0), std::clamp(py, 0.0, h - 1.0));
  double c = 0.0;
  for (const auto& t : taps) {
    if (t.weight != 0.0) c += t.weight * MatchCost(a, f2.Sample(t.x, t.y));
  }
  return c;
}

double ClipToSign(double v, DisparitySign sign) {
  return sign == DisparitySign::kNonPositive ? std::min(v, 0.0)
                                             : std::max(v, 0.0);
}

}  // namespace

void MatchConfig::Validate() const {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (range < 1) throw std::invalid_argument("range must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be a positive finite number");
  }
  if (!(residual_penalty >= 0.0) || !std::isfinite(residual_penalty)) {
    throw std::invalid_argument("residual penalty must be >= 0");
  }
  if (aggregation_radius < 0) {
    throw std::invalid_argument("aggregation radius must be >= 0");
  }
}

CostVolume ComputeCostVolume(const DescriptorImage& f1,
                             const DescriptorImage& f2,
                             const MotionField& prior, const Support& support) {
  if (f1.width() != f2.width() || f1.height() != f2.height() ||
      f1.width() != prior.width() || f1.height() != prior.height()) {
    throw std::invalid_argument("cost volume: resolution mismatch");
  }
  const int w = f1.width();
  const int h = f1.height();
  CostVolume cv{w, h, support, {}};
  cv.costs.assign(static_cast<std::size_t>(w) * h * support.size(), 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!prior.valid(x, y)) continue;
      const Vec2 p = prior.at(x, y);
      const Descriptor a = f1.Sample(x, y);
      auto c = cv.at(x, y);
      for (int i = 0; i < support.size(); ++i) {
        c[i] = SampledCost(a, f2, x + p.x + support.OffsetX(i),
                           y + p.y + support.OffsetY(i));
      }
    }
  }
  return cv;
}

void AddResidualPenalty(CostVolume& costs, double penalty) {
  if (penalty == 0.0) return;
  const Support& s = costs.support;
  std::vector<double> add(s.size());
  for (int i = 0; i < s.size(); ++i) {
    const double dx = s.OffsetX(i);
    const double dy = s.OffsetY(i);
    add[i] = penalty * (dx * dx + dy * dy);
  }
  const std::size_t n = costs.costs.size();
  for (std::size_t k = 0; k < n; ++k) costs.costs[k] += add[k % add.size()];
}

CostVolume AggregateCosts(const CostVolume& costs, int radius) {
  if (radius < 0) throw std::invalid_argument("aggregation radius must be >= 0");
  if (radius == 0) return costs;
  const int w = costs.width;
  const int h = costs.height;
  const std::size_t n = costs.support.size();
  // Separable box: rows into tmp, then columns into out.
  CostVolume tmp = costs;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(x - radius, 0);
      const int x1 = std::min(x + radius, w - 1);
      auto dst = tmp.at(x, y);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (int sx = x0; sx <= x1; ++sx) {
        const auto src = costs.at(sx, y);
        for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
      }
      for (double& v : dst) v /= (x1 - x0 + 1);
    }
  }
  CostVolume out = tmp;
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(y - radius, 0);
    const int y1 = std::min(y + radius, h - 1);
    for (int x = 0; x < w; ++x) {
      auto dst = out.at(x, y);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (int sy = y0; sy <= y1; ++sy) {
        const auto src = tmp.at(x, sy);
        for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
      }
      for (double& v : dst) v /= (y1 - y0 + 1);
    }
  }
  return out;
}

MatchDensity SoftmaxDensity(const CostVolume& costs, double tau) {
  MatchDensity out(costs.width, costs.height, costs.support);
  for (int y = 0; y < costs.height; ++y) {
    for (int x = 0; x < costs.width; ++x) {
      const auto c = costs.at(x, y);
      const double lo = *std::min_element(c.begin(), c.end());
      auto m = out.mass(x, y);
      double z = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        m[i] = std::exp(-(c[i] - lo) / tau);
        z += m[i];
      }
      for (double& v : m) v /= z;
    }
  }
  return out;
}

Matcher::Matcher(MatchConfig config) : config_(config) { config_.Validate(); }

LevelOutput Matcher::MatchLevel(const DescriptorImage& f1,
                                const DescriptorImage& f2,
                                const MotionField& prior) const {
  if (prior.width() != f1.width() || prior.height() != f1.height()) {
    throw std::invalid_argument(
        "match level: prior is " + std::to_string(prior.width()) + "x" +
        std::to_string(prior.height()) + ", level is " +
        std::to_string(f1.width()) + "x" + std::to_string(f1.height()));
  }
  const Support support = config_.support();
  LevelOutput out;
  CostVolume costs = ComputeCostVolume(f1, f2, prior, support);
  AddResidualPenalty(costs, config_.residual_penalty);
  out.residual_density = SoftmaxDensity(
      AggregateCosts(costs, config_.aggregation_radius), config_.tau);
  out.residual_field = DensityToVector(out.residual_density);
  out.running_field = MotionField(prior.width(), prior.height(), config_.dim());

  for (int y = 0; y < prior.height(); ++y) {
    for (int x = 0; x < prior.width(); ++x) {
      if (!prior.valid(x, y) || !out.residual_field.valid(x, y)) {
        out.running_field.Invalidate(x, y);
        continue;
      }
      const Vec2 p = prior.at(x, y);
      Vec2 r = out.residual_field.at(x, y);
      if (config_.mode == MatchMode::kStereo) {
        const double clipped = ClipToSign(p.x + r.x, config_.stereo_sign);
        if (clipped != p.x + r.x) {
          r.x = clipped - p.x;
          out.residual_field.Set(x, y, r);
        }
      }
      out.running_field.Set(x, y, p + r);
    }
  }
  out.confidence = ConfidenceMap(out.residual_density);
  return out;
}

MatchResult Matcher::Match(const FeaturePyramid& p1,
                           const FeaturePyramid& p2) const {
  if (p1.size() != config_.levels || p2.size() != config_.levels) {
    throw std::invalid_argument("pyramid depth does not match configuration");
  }
  MatchResult result;
  MotionField prior(p1.levels[0].width(), p1.levels[0].height(), config_.dim());
  for (int l = 0; l < config_.levels; ++l) {
    if (l > 0) prior = UpsampleField(result.levels.back().running_field);
    result.levels.push_back(MatchLevel(p1.levels[l], p2.levels[l], prior));
  }
  result.field = result.levels.back().running_field;
  result.confidence = result.levels.back().confidence;
  return result;
}

MatchResult Matcher::Match(const ScalarImage& i1, const ScalarImage& i2) const {
  if (!i1.SameShape(i2)) {
    throw std::invalid_argument(
        "image sizes differ: " + std::to_string(i1.width()) + "x" +
        std::to_string(i1.height()) + " vs " + std::to_string(i2.width()) +
        "x" + std::to_string(i2.height()));
  }
  return Match(BuildPyramid(i1, config_.levels),
               BuildPyramid(i2, config_.levels));
}

std::vector<double> EvaluateLevels(const MotionField& gt,
                                   std::span<const LevelOutput> outputs,
                                   const MatchConfig& config) {
  const int L = static_cast<int>(outputs.size());
  std::vector<double> losses;
  losses.reserve(L);
  for (int l = 0; l < L; ++l) {
    const MotionField gt_l = DownsampleField(gt, 1 << (L - 1 - l));
    const MotionField prior =
        l == 0 ? MotionField(gt_l.width(), gt_l.height(), gt.dim())
               : UpsampleField(outputs[l - 1].running_field);
    const MatchDensity target =
        VectorToDensity(SubtractFields(gt_l, prior), config.support());
    losses.push_back(KlLoss(target, outputs[l].residual_density));
  }
  return losses;
}

std::vector<LevelOutput> DecomposeGroundTruth(const MotionField& gt,
                                              const MatchConfig& config) {
  config.Validate();
  std::vector<LevelOutput> out;
  for (int l = 0; l < config.levels; ++l) {
    const MotionField gt_l = DownsampleField(gt, 1 << (config.levels - 1 - l));
    const MotionField prior =
        l == 0 ? MotionField(gt_l.width(), gt_l.height(), config.dim())
               : UpsampleField(out.back().running_field);
    LevelOutput level;
    level.residual_density =
        VectorToDensity(SubtractFields(gt_l, prior), config.support());
    level.residual_field = DensityToVector(level.residual_density);
    level.running_field = AddFields(prior, level.residual_field);
    level.confidence = ConfidenceMap(level.residual_density);
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace hd3
