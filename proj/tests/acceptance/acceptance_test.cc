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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hd3/density.h"
#include "hd3/field.h"
#include "hd3/full_density.h"
#include "hd3/io.h"
#include "hd3/matcher.h"
#include "hd3/metrics.h"
#include "hd3/propagation.h"
#include "hd3/reliability.h"
#include "hd3/synthetic.h"

namespace hd3 {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

// Largest deviation of any valid pixel's mass sum from 1.
double NormalizationDrift(const MatchDensity& d) {
  double worst = 0.0;
  for (int y = 0; y < d.height(); ++y) {
    for (int x = 0; x < d.width(); ++x) {
      if (!d.valid(x, y)) continue;
      double s = 0.0;
      for (double v : d.mass(x, y)) s += v;
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  return worst;
}

Outcome RoundTrip() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const Support s{4, FieldDim::kFlow};
  std::vector<double> m(s.size());
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 f{u(rng), u(rng)};
    if (!SplatVector(f, s, m)) return {false, "in-range vector rejected"};
    const auto back = LocalExpectation(m, s);
    if (!back) return {false, "empty window"};
    worst = std::max({worst, std::abs(back->x - f.x), std::abs(back->y - f.y)});
  }
  const double t = Seconds(start);
  return {worst < 1e-6 && t < 1.0, Fmt("max_err=%.3g runtime=%.3fs", worst, t)};
}

Outcome NormalizationAndKl() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double drift = 0.0;

  const Support s{4, FieldDim::kFlow};
  MotionField f(32, 32, FieldDim::kFlow);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) f.Set(x, y, {8 * u(rng) - 4, 8 * u(rng) - 4});
  }
  drift = std::max(drift, NormalizationDrift(VectorToDensity(f, s)));

  MatchConfig c;
  c.levels = 3;
  const SyntheticPair p = TranslatedPair(64, 64, 3, -2, 202);
  for (const auto& lvl : Matcher(c).Match(p.frame1, p.frame2).levels) {
    drift = std::max(drift, NormalizationDrift(lvl.residual_density));
  }
  MatchConfig st = MatchConfig::Stereo();
  st.levels = 3;
  const SyntheticPair sp = StereoPair(64, 32, 3, 203);
  for (const auto& lvl : Matcher(st).Match(sp.frame1, sp.frame2).levels) {
    drift = std::max(drift, NormalizationDrift(lvl.residual_density));
  }
  for (const auto& lvl : DecomposeGroundTruth(p.truth, c)) {
    drift = std::max(drift, NormalizationDrift(lvl.residual_density));
  }

  double self_max = 0.0, min_kl = INFINITY;
  const Support r2{2, FieldDim::kFlow};
  for (int i = 0; i < 1000; ++i) {
    MatchDensity a(1, 1, r2), b(1, 1, r2);
    double za = 0, zb = 0;
    for (int k = 0; k < r2.size(); ++k) {
      a.mass(0, 0)[k] = u(rng) < 0.5 ? u(rng) : 0.0;
      b.mass(0, 0)[k] = u(rng);
      za += a.mass(0, 0)[k];
      zb += b.mass(0, 0)[k];
    }
    if (za == 0.0) a.mass(0, 0)[0] = za = 1.0;
    for (double& v : a.mass(0, 0)) v /= za;
    for (double& v : b.mass(0, 0)) v /= zb;
    self_max = std::max({self_max, KlLoss(a, a), KlLoss(b, b)});
    min_kl = std::min({min_kl, KlLoss(a, b), KlLoss(b, a)});
  }
  return {drift <= 1e-6 && self_max < 1e-9 && min_kl >= 0.0,
          Fmt("max_mass_drift=%.3g max_self_kl=%.3g min_kl=%.4f", drift, self_max,
              min_kl)};
}

Outcome CompositionIdentity() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatchConfig c;
  c.levels = 3;
  const int n = 64;
  double worst = 0.0;
  int invalid = 0;
  for (int t = 0; t < 100; ++t) {
    // Smooth random field within the pyramid's capture range.
    const double a0 = 10 * u(rng), b0 = 10 * u(rng);
    const double ax = 0.03 * u(rng), ay = 0.03 * u(rng);
    const double bx = 0.03 * u(rng), by = 0.03 * u(rng);
    const double amp = 2 * u(rng), wx = 0.05 + 0.05 * u(rng), wy = 0.05 + 0.05 * u(rng);
    MotionField gt(n, n, FieldDim::kFlow);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        gt.Set(x, y, {a0 + ax * x + ay * y + amp * std::sin(wx * x + wy * y),
                      b0 + bx * x + by * y + amp * std::cos(wy * x - wx * y)});
      }
    }
    const auto levels = DecomposeGroundTruth(gt, c);
    std::vector<MotionField> residuals;
    for (const auto& l : levels) {
      residuals.push_back(DensityToVector(l.residual_density));
    }
    const MotionField f = ComposePointEstimates(residuals);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (!f.valid(x, y)) {
          ++invalid;
          continue;
        }
        worst = std::max(worst, Norm(f.at(x, y) - gt.at(x, y)));
      }
    }
  }
  return {invalid == 0 && worst < 1e-4,
          Fmt("fields=100 max_err=%.3g invalid_pixels=%.0f", worst, invalid)};
}

Outcome FullDensityOracle() {
  std::mt19937_64 rng(404);
  const Support s{1, FieldDim::kFlow};
  std::uniform_int_distribution<int> cell(0, s.size() - 1);
  std::uniform_real_distribution<double> u(0.1, 1.0);

  // Delta stacks: the exact density is a single atom at the composed point
  // estimate.
  int mismatches = 0;
  for (int t = 0; t < 20; ++t) {
    std::vector<MatchDensity> levels = {MatchDensity(4, 4, s), MatchDensity(8, 8, s)};
    for (auto& d : levels) {
      for (int y = 0; y < d.height(); ++y) {
        for (int x = 0; x < d.width(); ++x) d.mass(x, y)[cell(rng)] = 1.0;
      }
    }
    const FullDensity full = ComposeFullDensity(levels);
    std::vector<MotionField> residuals;
    for (const auto& d : levels) residuals.push_back(DensityToVector(d));
    const MotionField point = ComposePointEstimates(residuals);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        mismatches += full.atoms(x, y).size() != 1 ||
                      full.Mode(x, y).displacement != point.at(x, y);
      }
    }
  }

  // Mixed densities, with and without truncation.
  double drift = 0.0;
  for (int t = 0; t < 10; ++t) {
    std::vector<MatchDensity> levels = {MatchDensity(4, 4, s), MatchDensity(8, 8, s)};
    for (auto& d : levels) {
      for (int y = 0; y < d.height(); ++y) {
        for (int x = 0; x < d.width(); ++x) {
          auto m = d.mass(x, y);
          double z = 0;
          for (int k = 0; k < 2; ++k) {
            const double v = u(rng);
            m[cell(rng)] += v;
            z += v;
          }
          for (double& v : m) v /= z;
        }
      }
    }
    FullDensityOptions opts;
    opts.max_displacement = t % 2 == 0 ? 64.0 : 2.0;
    const FullDensity full = ComposeFullDensity(levels, opts);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        drift = std::max(drift, std::abs(full.RetainedMass(x, y) +
                                         full.truncated_mass(x, y) - 1.0));
      }
    }
  }
  return {mismatches == 0 && drift <= 1e-9,
          Fmt("mode_mismatches=%.0f/1280 max_mass_drift=%.3g", mismatches, drift)};
}

Outcome SyntheticFlow() {
  const SyntheticPair p = TranslatedPair(128, 128, 6, 3, 505);
  MatchConfig c;
  c.levels = 3;
  const auto start = Clock::now();
  const MatchResult r = Matcher(c).Match(p.frame1, p.frame2);
  const double t = Seconds(start);
  MotionField gt = p.truth;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (!p.overlap.at(x, y)) gt.Invalidate(x, y);
    }
  }
  const EvalReport e = ComputeEpeFl(r.field, gt);
  return {e.epe < 0.5 && t < 10.0,
          Fmt("epe=%.3f fl=%.3f runtime=%.3fs", e.epe, e.fl, t)};
}

Outcome SyntheticStereo() {
  const SyntheticPair p = StereoPair(128, 128, 5, 606);
  MatchConfig c = MatchConfig::Stereo();
  c.levels = 4;
  const MatchResult r = Matcher(c).Match(p.frame1, p.frame2);
  int violations = 0;
  for (const auto& lvl : r.levels) {
    const MotionField& f = lvl.running_field;
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        violations += f.valid(x, y) && f.at(x, y).x > 0.0;
      }
    }
  }
  MotionField gt = p.truth;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (!p.overlap.at(x, y)) gt.Invalidate(x, y);
    }
  }
  const EvalReport e = ComputeEpeFl(r.field, gt);
  return {violations == 0 && e.epe < 0.5,
          Fmt("sign_violations=%.0f epe=%.3f", violations, e.epe)};
}

Outcome UncertaintyVersusFb() {
  MatchConfig c;
  c.levels = 3;
  const Matcher m(c);
  int wins = 0;
  double unc_sum = 0, fb_sum = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    SyntheticPair p = TranslatedPair(128, 128, 4, 2, 1000 + seed);
    DestroyBand(p, 48, 80, 2000 + seed);
    const MatchResult fw = m.Match(p.frame1, p.frame2);
    const MatchResult bw = m.Match(p.frame2, p.frame1);
    MotionField gt = p.truth;
    for (int y = 0; y < 128; ++y) {
      for (int x = 0; x < 128; ++x) {
        if (!p.overlap.at(x, y)) gt.Invalidate(x, y);
      }
    }
    const double unc =
        ScoreClassification(ClassifyByUncertainty(fw.confidence, 0.3), gt, fw.field,
                            p.noc)
            .all.mean.iou;
    const double fb = ScoreClassification(ClassifyByFbConsistency(fw.field, bw.field),
                                          gt, fw.field, p.noc)
                          .all.mean.iou;
    wins += unc >= fb;
    unc_sum += unc;
    fb_sum += fb;
  }
  return {wins >= 16, Fmt("uncertainty_wins=%.0f/20 mean_iou_unc=%.2f mean_iou_fb=%.2f",
                          wins, unc_sum / 20, fb_sum / 20)};
}

LabelMap RandomLabels(int w, int h, int classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(0, classes - 1);
  LabelMap m(w, h);
  for (int& v : m.labels) v = c(rng);
  return m;
}

Outcome RegionPropagation() {
  std::mt19937_64 rng(808);
  const LabelMap labels = RandomLabels(32, 24, 4, rng);
  const LabelProbMap seed = LabelProbMap::FromLabels(labels, 4);

  const std::vector<Guide> identity(10, Guide(MotionField(32, 24, FieldDim::kFlow)));
  bool identity_ok = true;
  for (const auto& f : PropagateSequence(seed, identity)) {
    identity_ok = identity_ok && f == seed && HardLabels(f) == labels;
  }

  bool shift_ok = true;
  for (const Vec2 d : {Vec2{3, 0}, Vec2{-2, 1}, Vec2{0, -4}}) {
    const LabelMap out = HardLabels(
        SplatForward(seed, MotionField::Constant(32, 24, FieldDim::kFlow, d)));
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 32; ++x) {
        const int sx = x - static_cast<int>(d.x), sy = y - static_cast<int>(d.y);
        const bool inside = sx >= 0 && sy >= 0 && sx < 32 && sy < 24;
        shift_ok = shift_ok && out.at(x, y) == (inside ? labels.at(sx, sy) : kUnknownLabel);
      }
    }
  }

  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const Support s{4, FieldDim::kFlow};
  int disagreements = 0;
  for (int t = 0; t < 10; ++t) {
    MotionField f(32, 24, FieldDim::kFlow);
    for (int y = 0; y < 24; ++y) {
      for (int x = 0; x < 32; ++x) f.Set(x, y, {u(rng), u(rng)});
    }
    const LabelProbMap a = SplatForward(seed, f);
    const LabelProbMap b = SplatForward(seed, DensityGuide(VectorToDensity(f, s)));
    disagreements += !(a == b);
  }
  return {identity_ok && shift_ok && disagreements == 0,
          std::string("identity=") + (identity_ok ? "exact" : "changed") +
              " shift=" + (shift_ok ? "exact" : "wrong") +
              Fmt(" guide_disagreements=%.0f/10", disagreements)};
}

Outcome MetricsAndFormats() {
  bool ok = true;
  std::string failed;
  const auto check = [&](bool c, const char* what) {
    if (!c) {
      ok = false;
      failed += std::string(" ") + what;
    }
  };
  const auto constant = [](double u) {
    return MotionField::Constant(4, 4, FieldDim::kFlow, {u, 0});
  };
  EvalReport e = ComputeEpeFl(constant(7), constant(7));
  check(e.epe == 0.0 && e.fl == 0.0, "epe_identity");
  e = ComputeEpeFl(constant(14), constant(10));
  check(e.epe == 4.0 && e.fl == 1.0, "epe_10_14");
  e = ComputeEpeFl(constant(104), constant(100));
  check(e.epe == 4.0 && e.fl == 0.0, "epe_100_104");

  const std::vector<std::uint8_t> want = {0x50, 0x49, 0x45, 0x48, 0x01, 0x00, 0x00,
                                          0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00,
                                          0xC0, 0x3F, 0x00, 0x00, 0x00, 0xC0};
  const auto one = MotionField::Constant(1, 1, FieldDim::kFlow, {1.5, -2.0});
  check(EncodeFlo(one) == want, "flo_bytes");
  auto bad = want;
  bad[3] = 'X';
  bool threw = false;
  try {
    DecodeFlo(bad);
  } catch (const FormatError&) {
    threw = true;
  }
  check(threw, "flo_magic");
  check(EncodeKittiFlow({0, 0}, true) == std::array<std::uint16_t, 3>{32768, 32768, 1},
        "kitti_zero");
  check(EncodeKittiDisparity(5.0) == 1280, "kitti_disparity");

  const fs::path dir = fs::temp_directory_path() / "hd3_acceptance";
  fs::create_directories(dir);
  WritePng(dir / "zero.png", PngData{1, 1, 1, 16, false, {0}});
  check(!ReadKittiDisparity(dir / "zero.png").valid(0, 0), "kitti_raw_zero");

  std::mt19937_64 rng(909);
  std::uniform_real_distribution<float> uf(-500.0f, 500.0f);
  std::uniform_int_distribution<int> raw(-30000, 30000), disp(1, 65535);
  int lossy = 0;
  const auto same = [](const MotionField& a, const MotionField& b) {
    if (a.width() != b.width() || a.height() != b.height()) return false;
    for (int y = 0; y < a.height(); ++y) {
      for (int x = 0; x < a.width(); ++x) {
        if (a.valid(x, y) != b.valid(x, y)) return false;
        if (a.valid(x, y) && a.at(x, y) != b.at(x, y)) return false;
      }
    }
    return true;
  };
  for (int t = 0; t < 1000; ++t) {
    MotionField f(8, 6, t % 3 == 2 ? FieldDim::kStereo : FieldDim::kFlow);
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 8; ++x) {
        switch (t % 3) {
          case 0: f.Set(x, y, {uf(rng), uf(rng)}); break;
          case 1: f.Set(x, y, {raw(rng) / 64.0, raw(rng) / 64.0}); break;
          default: f.Set(x, y, {-disp(rng) / 256.0, 0.0}); break;
        }
      }
    }
    f.Invalidate(t % 8, t % 6);
    MotionField back;
    switch (t % 3) {
      case 0:
        WriteFlo(dir / "r.flo", f);
        back = ReadFlo(dir / "r.flo");
        break;
      case 1:
        WriteKittiFlow(dir / "r.png", f);
        back = ReadKittiFlow(dir / "r.png");
        break;
      default:
        WriteKittiDisparity(dir / "d.png", f);
        back = ReadKittiDisparity(dir / "d.png");
        break;
    }
    lossy += !same(f, back);
  }
  fs::remove_all(dir);
  check(lossy == 0, "round_trips");
  return {ok, Fmt("lossy_round_trips=%.0f/1000", lossy) +
                  (failed.empty() ? "" : " failed:" + failed)};
}

}  // namespace
}  // namespace hd3

int main() {
  using hd3::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"vector/density round trip", hd3::RoundTrip},
      {"normalization and KL", hd3::NormalizationAndKl},
      {"composition identity", hd3::CompositionIdentity},
      {"full-density oracle", hd3::FullDensityOracle},
      {"synthetic flow", hd3::SyntheticFlow},
      {"synthetic stereo", hd3::SyntheticStereo},
      {"uncertainty vs forward-backward", hd3::UncertaintyVersusFb},
      {"region propagation", hd3::RegionPropagation},
      {"metrics and formats", hd3::MetricsAndFormats},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %zu: %s %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
