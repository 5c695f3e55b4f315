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

#include "hd3/propagation.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hd3 {

namespace {

class Splatter {
 public:
  explicit Splatter(const LabelProbMap& source)
      : source_(source) {
    acc_.width = source.width();
    acc_.height = source.height();
    acc_.classes = source.classes();
    acc_.class_mass.assign(
        static_cast<std::size_t>(acc_.width) * acc_.height * acc_.classes, 0.0);
    acc_.weight.assign(static_cast<std::size_t>(acc_.width) * acc_.height, 0.0);
  }

  // Sends weight w of source pixel (sx, sy) to target (tx, ty).
  void Add(int sx, int sy, int tx, int ty, double w) {
    acc_.emitted += w;
    if (tx < 0 || ty < 0 || tx >= acc_.width || ty >= acc_.height) {
      acc_.dropped += w;
      return;
    }
    const std::size_t t = static_cast<std::size_t>(ty) * acc_.width + tx;
    acc_.weight[t] += w;
    const auto p = source_.probs(sx, sy);
    double* dst = acc_.class_mass.data() + t * acc_.classes;
    for (int c = 0; c < acc_.classes; ++c) dst[c] += w * p[c];
  }

  SplatAccumulator Take() { return std::move(acc_); }

 private:
  const LabelProbMap& source_;
  SplatAccumulator acc_;
};

void SplatVectors(const LabelProbMap& src, const MotionField& flow,
                  Splatter& out) {
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      if (src.unknown(x, y) || !flow.valid(x, y)) continue;
      const Vec2 f = flow.at(x, y);
      for (const auto& t : BilinearTaps(f.x, f.y)) {
        if (t.weight != 0.0) out.Add(x, y, x + t.x, y + t.y, t.weight);
      }
    }
  }
}

void SplatDensity(const LabelProbMap& src, const DensityGuide& guide,
                  Splatter& out) {
  const MatchDensity& d = guide.density;
  const Support& s = d.support();
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      if (src.unknown(x, y) || !d.valid(x, y)) continue;
      Vec2 base;
      if (guide.base) {
        if (!guide.base->valid(x, y)) continue;
        base = guide.base->at(x, y);
      }
      const auto m = d.mass(x, y);
      for (int i = 0; i < s.size(); ++i) {
        if (m[i] == 0.0) continue;
        const int dx = s.OffsetX(i);
        const int dy = s.OffsetY(i);
        if (!guide.base) {
          out.Add(x, y, x + dx, y + dy, m[i]);
          continue;
        }
        for (const auto& t : BilinearTaps(base.x + dx, base.y + dy)) {
          if (t.weight != 0.0) out.Add(x, y, x + t.x, y + t.y, m[i] * t.weight);
        }
      }
    }
  }
}

void CheckShape(const LabelProbMap& src, int w, int h) {
  if (src.width() != w || src.height() != h) {
    throw std::invalid_argument("splat: guide and label map differ in size");
  }
}

}  // namespace

LabelProbMap::LabelProbMap(int width, int height, int classes)
    : width_(width), height_(height), classes_(classes) {
  if (classes < 1) throw std::invalid_argument("need at least one class");
  const auto n = static_cast<std::size_t>(width) * height;
  probs_.assign(n * classes, 1.0 / classes);
  unknown_.assign(n, 1);
}

void LabelProbMap::SetUnknown(int x, int y) {
  auto p = probs(x, y);
  std::fill(p.begin(), p.end(), 1.0 / classes_);
  unknown_[Pixel(x, y)] = 1;
}

LabelProbMap LabelProbMap::FromLabels(const LabelMap& labels, int classes) {
  LabelProbMap m(labels.width, labels.height, classes);
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      const int c = labels.at(x, y);
      if (c == kUnknownLabel) continue;
      if (c < 0 || c >= classes) {
        throw std::invalid_argument("label " + std::to_string(c) +
                                    " outside [0, " + std::to_string(classes) +
                                    ")");
      }
      auto p = m.probs(x, y);
      std::fill(p.begin(), p.end(), 0.0);
      p[c] = 1.0;
      m.SetKnown(x, y);
    }
  }
  return m;
}

SplatAccumulator AccumulateSplat(const LabelProbMap& source, const Guide& guide) {
  Splatter splatter(source);
  if (const auto* flow = std::get_if<MotionField>(&guide)) {
    CheckShape(source, flow->width(), flow->height());
    SplatVectors(source, *flow, splatter);
  } else {
    const auto& dg = std::get<DensityGuide>(guide);
    CheckShape(source, dg.density.width(), dg.density.height());
    if (dg.base) CheckShape(source, dg.base->width(), dg.base->height());
    SplatDensity(source, dg, splatter);
  }
  return splatter.Take();
}

LabelProbMap NormalizeSplat(const SplatAccumulator& acc) {
  LabelProbMap out(acc.width, acc.height, acc.classes);
  for (int y = 0; y < acc.height; ++y) {
    for (int x = 0; x < acc.width; ++x) {
      const std::size_t t = static_cast<std::size_t>(y) * acc.width + x;
      const double w = acc.weight[t];
      if (!(w > 0.0)) continue;
      auto p = out.probs(x, y);
      for (int c = 0; c < acc.classes; ++c) {
        p[c] = acc.class_mass[t * acc.classes + c] / w;
      }
      out.SetKnown(x, y);
    }
  }
  return out;
}

LabelProbMap SplatForward(const LabelProbMap& source, const Guide& guide) {
  return NormalizeSplat(AccumulateSplat(source, guide));
}

std::vector<LabelProbMap> PropagateSequence(const LabelProbMap& seed,
                                            std::span<const Guide> guides) {
  std::vector<LabelProbMap> frames;
  frames.reserve(guides.size());
  const LabelProbMap* prev = &seed;
  for (const Guide& g : guides) {
    frames.push_back(SplatForward(*prev, g));
    prev = &frames.back();
  }
  return frames;
}

LabelMap HardLabels(const LabelProbMap& map) {
  LabelMap out(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (map.unknown(x, y)) continue;
      const auto p = map.probs(x, y);
      out.at(x, y) =
          static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    }
  }
  return out;
}

SegmentationScore ScoreSegmentation(const LabelMap& predicted,
                                    const LabelMap& truth, int classes) {
  if (predicted.width != truth.width || predicted.height != truth.height) {
    throw std::invalid_argument("segmentation score: size mismatch");
  }
  std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0),
      present(classes, 0);
  std::size_t scored = 0;
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    const int t = truth.labels[i];
    const int p = predicted.labels[i];
    if (t == kUnknownLabel || p == kUnknownLabel) continue;
    if (t < 0 || t >= classes || p < 0 || p >= classes) {
      throw std::invalid_argument("segmentation score: label out of range");
    }
    ++scored;
    ++present[t];
    if (p == t) {
      ++tp[t];
    } else {
      ++fn[t];
      ++fp[p];
    }
  }
  if (scored == 0) {
    throw std::invalid_argument("segmentation score: no labeled pixels");
  }
  SegmentationScore s;
  for (int c = 0; c < classes; ++c) {
    if (present[c] == 0) continue;
    s.mean_iou += static_cast<double>(tp[c]) / (tp[c] + fp[c] + fn[c]);
    s.mean_acc += static_cast<double>(tp[c]) / (tp[c] + fn[c]);
    ++s.classes_present;
  }
  s.mean_iou *= 100.0 / s.classes_present;
  s.mean_acc *= 100.0 / s.classes_present;
  return s;
}

MotionField VectorGuide(const MatchResult& match) { return match.field; }

DensityGuide ProbabilisticGuide(const MatchResult& match) {
  if (match.levels.empty()) throw std::invalid_argument("empty match result");
  const LevelOutput& last = match.levels.back();
  MotionField base =
      match.levels.size() > 1
          ? UpsampleField(match.levels[match.levels.size() - 2].running_field)
          : MotionField(last.running_field.width(), last.running_field.height(),
                        last.running_field.dim());
  return {last.residual_density, std::move(base)};
}

}  // namespace hd3
