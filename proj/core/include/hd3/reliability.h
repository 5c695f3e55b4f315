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

// Inlier/outlier classification of dense correspondences, either from the
// matcher's uncertainty or from forward-backward consistency, and its
// segmentation-style scoring against ground truth.

#ifndef HD3_RELIABILITY_H_
#define HD3_RELIABILITY_H_

#include <cstddef>
#include <optional>
#include <string>

#include "hd3/field.h"

namespace hd3 {

inline constexpr double kDefaultUncertaintyThreshold = 0.3;

// Outlier where 1 - confidence > sigma. Throws std::invalid_argument unless
// 0 < sigma < 1.
Mask ClassifyByUncertainty(const ScalarImage& confidence, double sigma);

struct ConsistencyThresholds {
  double absolute_px = 3.0;
  double relative = 0.05;
};

// Outlier where |fw(x) + bw(x + fw(x))| exceeds
// max(absolute_px, relative * (|fw(x)| + |bw(x + fw(x))|)), with bw sampled
// bilinearly. Pixels whose forward vector is invalid or lands where bw cannot
// be sampled are outliers.
Mask ClassifyByFbConsistency(const MotionField& forward,
                             const MotionField& backward,
                             const ConsistencyThresholds& thresholds = {});

// Ground-truth labels: outlier when the estimate is invalid or fails the
// KITTI 3 px / 5% rule. Only pixels with valid ground truth are meaningful.
Mask TrueOutliers(const MotionField& estimate, const MotionField& truth);

struct ClassScores {
  double iou = 0.0;  // percent
  double acc = 0.0;  // percent
};

struct RegionScores {
  ClassScores outlier;
  ClassScores inlier;
  ClassScores mean;
  std::size_t pixels = 0;
};

struct OutlierReport {
  RegionScores noc;
  RegionScores all;
  std::optional<double> sigma;
};

// IoU = TP / (TP + FP + FN) and Acc = TP / (TP + FN) per class, in percent,
// over pixels with valid ground truth (All) and those also inside noc_mask
// (Noc). An empty denominator scores 100. Throws std::invalid_argument when
// either region is empty or sizes differ.
OutlierReport ScoreClassification(const Mask& predicted_outliers,
                                  const MotionField& truth,
                                  const MotionField& estimate,
                                  const Mask& noc_mask);

// Aligned table in the layout Class | Noc IoU Acc | All IoU Acc.
std::string FormatOutlierTable(const OutlierReport& report);
// One "key=value" metric per line, e.g. "all.outlier.iou=37.600".
std::string OutlierKeyValues(const OutlierReport& report);

}  // namespace hd3

#endif  // HD3_RELIABILITY_H_
