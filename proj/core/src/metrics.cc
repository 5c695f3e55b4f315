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

#include "hd3/metrics.h"

#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hd3 {

bool IsFlOutlier(Vec2 estimate, Vec2 truth) {
  const double err = Norm(estimate - truth);
  return err > kOutlierAbsolutePx && err > kOutlierRelative * Norm(truth);
}

EvalReport ComputeEpeFl(const MotionField& estimate, const MotionField& truth) {
  if (!estimate.SameShape(truth)) {
    throw std::invalid_argument("eval: estimate and ground truth differ in size");
  }
  EvalReport r;
  double epe_sum = 0.0;
  std::size_t outliers = 0;
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      if (!truth.valid(x, y) || !estimate.valid(x, y)) continue;
      epe_sum += Norm(estimate.at(x, y) - truth.at(x, y));
      if (IsFlOutlier(estimate.at(x, y), truth.at(x, y))) ++outliers;
      ++r.count;
    }
  }
  if (r.count == 0) {
    throw std::invalid_argument("eval: no pixel is valid in both fields");
  }
  r.epe = epe_sum / static_cast<double>(r.count);
  r.fl = static_cast<double>(outliers) / static_cast<double>(r.count);
  return r;
}

std::string FormatEvalReport(const EvalReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "epe=%.3f fl=%.3f count=%zu", report.epe,
                report.fl, report.count);
  std::string s = buf;
  if (report.avg_loglik) {
    std::snprintf(buf, sizeof(buf), " avg_loglik=%.4f", *report.avg_loglik);
    s += buf;
  }
  return s;
}

std::string EvalReportJson(const EvalReport& report) {
  nlohmann::json j = {
      {"epe", report.epe}, {"fl", report.fl}, {"count", report.count}};
  if (report.avg_loglik) j["avg_loglik"] = *report.avg_loglik;
  return j.dump();
}

}  // namespace hd3
