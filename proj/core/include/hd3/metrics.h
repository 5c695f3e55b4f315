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

#ifndef HD3_METRICS_H_
#define HD3_METRICS_H_

#include <cstddef>
#include <optional>
#include <string>

#include "hd3/field.h"

namespace hd3 {

// KITTI outlier rule: end-point error above 3 px and above 5% of the
// ground-truth magnitude.
inline constexpr double kOutlierAbsolutePx = 3.0;
inline constexpr double kOutlierRelative = 0.05;

bool IsFlOutlier(Vec2 estimate, Vec2 truth);

struct EvalReport {
  double epe = 0.0;
  double fl = 0.0;
  std::optional<double> avg_loglik;
  std::size_t count = 0;
};

// Over pixels valid in both fields. Throws std::invalid_argument on a size
// mismatch or an empty intersection.
EvalReport ComputeEpeFl(const MotionField& estimate, const MotionField& truth);

// "epe=0.000 fl=0.000 count=N" plus avg_loglik when present.
std::string FormatEvalReport(const EvalReport& report);
std::string EvalReportJson(const EvalReport& report);

}  // namespace hd3

#endif  // HD3_METRICS_H_
