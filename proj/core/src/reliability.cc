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

#include "hd3/reliability.h"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "hd3/metrics.h"

namespace hd3 {

namespace {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

double Percent(std::size_t num, std::size_t den) {
  return den == 0 ? 100.0 : 100.0 * static_cast<double>(num) / den;
}

ClassScores Score(const Confusion& c) {
  return {Percent(c.tp, c.tp + c.fp + c.fn), Percent(c.tp, c.tp + c.fn)};
}

RegionScores ScoreRegion(const Mask& predicted, const Mask& truth,
                         const Mask& region) {
  Confusion out;
  Confusion in;
  std::size_t pixels = 0;
  for (std::size_t i = 0; i < region.values.size(); ++i) {
    if (!region.values[i]) continue;
    ++pixels;
    const bool p = predicted.values[i] != 0;
    const bool t = truth.values[i] != 0;
    if (p && t) ++out.tp;
    if (p && !t) ++out.fp;
    if (!p && t) ++out.fn;
    if (!p && !t) ++in.tp;
    if (!p && t) ++in.fp;
    if (p && !t) ++in.fn;
  }
  if (pixels == 0) {
    throw std::invalid_argument("classification score: empty evaluation region");
  }
  RegionScores r;
  r.outlier = Score(out);
  r.inlier = Score(in);
  r.mean = {(r.outlier.iou + r.inlier.iou) / 2.0,
            (r.outlier.acc + r.inlier.acc) / 2.0};
  r.pixels = pixels;
  return r;
}

}  // namespace

Mask ClassifyByUncertainty(const ScalarImage& confidence, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("sigma must lie in (0, 1)");
  }
  Mask out(confidence.width(), confidence.height());
  for (int y = 0; y < confidence.height(); ++y) {
    for (int x = 0; x < confidence.width(); ++x) {
      out.set(x, y, 1.0 - confidence.at(x, y) > sigma);
    }
  }
  return out;
}

Mask ClassifyByFbConsistency(const MotionField& forward,
                             const MotionField& backward,
                             const ConsistencyThresholds& thresholds) {
  if (!forward.SameShape(backward)) {
    throw std::invalid_argument("consistency check: field size mismatch");
  }
  const int w = forward.width();
  const int h = forward.height();
  Mask out(w, h, true);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!forward.valid(x, y)) continue;
      const Vec2 f = forward.at(x, y);
      const auto taps = BilinearTaps(x + f.x, y + f.y);
      if (!TapsInside(taps, w, h)) continue;
      Vec2 b;
      bool ok = true;
      for (const auto& t : taps) {
        if (t.weight == 0.0) continue;
        if (!backward.valid(t.x, t.y)) {
          ok = false;
          break;
        }
        b = b + t.weight * backward.at(t.x, t.y);
      }
      if (!ok) continue;
      const double diff = Norm(f + b);
      const double bound = std::max(
          thresholds.absolute_px, thresholds.relative * (Norm(f) + Norm(b)));
      out.set(x, y, diff > bound);
    }
  }
  return out;
}

Mask TrueOutliers(const MotionField& estimate, const MotionField& truth) {
  if (!estimate.SameShape(truth)) {
    throw std::invalid_argument("outlier labels: field size mismatch");
  }
  Mask out(truth.width(), truth.height());
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      if (!truth.valid(x, y)) continue;
      out.set(x, y,
              !estimate.valid(x, y) ||
                  IsFlOutlier(estimate.at(x, y), truth.at(x, y)));
    }
  }
  return out;
}

OutlierReport ScoreClassification(const Mask& predicted_outliers,
                                  const MotionField& truth,
                                  const MotionField& estimate,
                                  const Mask& noc_mask) {
  const int w = truth.width();
  const int h = truth.height();
  if (predicted_outliers.width != w || predicted_outliers.height != h ||
      noc_mask.width != w || noc_mask.height != h) {
    throw std::invalid_argument("classification score: size mismatch");
  }
  const Mask labels = TrueOutliers(estimate, truth);
  Mask all(w, h);
  Mask noc(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      all.set(x, y, truth.valid(x, y));
      noc.set(x, y, truth.valid(x, y) && noc_mask.at(x, y));
    }
  }
  OutlierReport r;
  r.all = ScoreRegion(predicted_outliers, labels, all);
  r.noc = ScoreRegion(predicted_outliers, labels, noc);
  return r;
}

std::string FormatOutlierTable(const OutlierReport& report) {
  std::string s;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s | %7s %7s | %7s %7s\n", "Class",
                "NocIoU", "NocAcc", "AllIoU", "AllAcc");
  s += buf;
  const auto row = [&](const char* name, const ClassScores& noc,
                       const ClassScores& all) {
    std::snprintf(buf, sizeof(buf), "%-8s | %7.1f %7.1f | %7.1f %7.1f\n", name,
                  noc.iou, noc.acc, all.iou, all.acc);
    s += buf;
  };
  row("Outlier", report.noc.outlier, report.all.outlier);
  row("Inlier", report.noc.inlier, report.all.inlier);
  row("Mean", report.noc.mean, report.all.mean);
  return s;
}

std::string OutlierKeyValues(const OutlierReport& report) {
  std::string s;
  char buf[96];
  const auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s=%.3f\n", key, v);
    s += buf;
  };
  if (report.sigma) put("sigma", *report.sigma);
  for (const auto& [region, scores] :
       {std::pair{"noc", &report.noc}, std::pair{"all", &report.all}}) {
    for (const auto& [cls, c] :
         {std::pair{"outlier", &scores->outlier},
          std::pair{"inlier", &scores->inlier}, std::pair{"mean", &scores->mean}}) {
      put((std::string(region) + "." + cls + ".iou").c_str(), c->iou);
      put((std::string(region) + "." + cls + ".acc").c_str(), c->acc);
    }
  }
  std::snprintf(buf, sizeof(buf), "noc.pixels=%zu\nall.pixels=%zu\n",
                report.noc.pixels, report.all.pixels);
  s += buf;
  return s;
}

}  // namespace hd3
