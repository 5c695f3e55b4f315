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


#include "cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hd3/density.h"
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
using nlohmann::json;

// Raised for bad flag combinations that CLI11 cannot express.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

struct MatchFlags {
  std::string mode = "flow";
  int levels = 0;
  int range = MatchConfig{}.range;
  double tau = MatchConfig{}.tau;
  double penalty = MatchConfig{}.residual_penalty;
  int aggregation = MatchConfig{}.aggregation_radius;
  std::string sign = "nonpositive";

  void Add(CLI::App* app) {
    app->add_option("--mode", mode, "flow or stereo")
        ->check(CLI::IsMember({"flow", "stereo"}))
        ->capture_default_str();
    app->add_option("--levels", levels,
                    "pyramid levels (default 5 for flow, 6 for stereo)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--range", range, "support radius per level")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--tau", tau, "softmax temperature on [0, 1] costs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--penalty", penalty, "residual penalty per squared pixel")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--aggregation", aggregation, "cost aggregation box radius")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--stereo-sign", sign,
                    "sign stereo estimates are clipped to")
        ->check(CLI::IsMember({"nonpositive", "nonnegative"}))
        ->capture_default_str();
  }

  MatchConfig Config() const {
    MatchConfig c = mode == "stereo" ? MatchConfig::Stereo() : MatchConfig::Flow();
    if (levels > 0) c.levels = levels;
    c.range = range;
    c.tau = tau;
    c.residual_penalty = penalty;
    c.aggregation_radius = aggregation;
    c.stereo_sign = sign == "nonnegative" ? DisparitySign::kNonNegative
                                          : DisparitySign::kNonPositive;
    c.Validate();
    return c;
  }
};

double MeanOf(const ScalarImage& img) {
  double s = 0.0;
  for (double v : img.values()) s += v;
  return img.values().empty() ? 0.0 : s / img.values().size();
}

// ---------------------------------------------------------------- match

struct MatchArgs {
  MatchFlags flags;
  std::string image1, image2, output, confidence;
};

int RunMatch(const MatchArgs& a, std::ostream& out) {
  const MatchConfig cfg = a.flags.Config();
  const ScalarImage i1 = ReadImage(a.image1);
  const ScalarImage i2 = ReadImage(a.image2);
  if (!i1.SameShape(i2)) {
    throw std::invalid_argument(
        "match: image sizes differ (" + std::to_string(i1.width()) + "x" +
        std::to_string(i1.height()) + " vs " + std::to_string(i2.width()) +
        "x" + std::to_string(i2.height()) + ")");
  }
  const MatchResult r = Matcher(cfg).Match(i1, i2);
  WriteField(a.output, r.field);
  if (!a.confidence.empty()) WriteConfidencePgm(a.confidence, r.confidence);
  out << "match " << r.field.width() << "x" << r.field.height()
      << " mode=" << a.flags.mode << " levels=" << cfg.levels
      << " mean_confidence=" << Fixed(MeanOf(r.confidence), 4) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string estimate, truth;
  bool disparity = false;
  bool as_json = false;
};

int RunEval(const EvalArgs& a, std::ostream& out) {
  const MotionField est = ReadField(a.estimate, a.disparity);
  const MotionField gt = ReadField(a.truth, a.disparity);
  const EvalReport r = ComputeEpeFl(est, gt);
  out << (a.as_json ? EvalReportJson(r) : FormatEvalReport(r)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  MatchFlags flags;
  std::string method;
  std::string truth, noc, confidence, estimate, forward, backward;
  std::string image1, image2;
  bool disparity = false;
  double sigma = kDefaultUncertaintyThreshold;
  std::string format = "both";
};

int RunClassify(const ClassifyArgs& a, std::ostream& out) {
  const MotionField gt = ReadField(a.truth, a.disparity);
  const bool from_images = !a.image1.empty() || !a.image2.empty();
  const bool from_fb = !a.forward.empty() || !a.backward.empty();
  const bool from_conf = !a.confidence.empty();
  if (from_images + from_fb + from_conf != 1) {
    throw UsageError(
        "classify: give exactly one of --image1/--image2, "
        "--forward/--backward, or --confidence/--estimate");
  }
  std::string method = a.method;
  if (method.empty()) method = from_fb ? "fb" : "uncertainty";
  if ((from_fb && method != "fb") || (from_conf && method != "uncertainty")) {
    throw UsageError("classify: --method " + method +
                     " does not fit the given inputs");
  }

  MotionField estimate;
  Mask predicted;
  if (from_images) {
    if (a.image1.empty() || a.image2.empty()) {
      throw UsageError("classify: need both --image1 and --image2");
    }
    const ScalarImage i1 = ReadImage(a.image1);
    const ScalarImage i2 = ReadImage(a.image2);
    MatchConfig cfg = a.flags.Config();
    const MatchResult fw = Matcher(cfg).Match(i1, i2);
    estimate = fw.field;
    if (method == "fb") {
      cfg.stereo_sign = cfg.stereo_sign == DisparitySign::kNonPositive
                            ? DisparitySign::kNonNegative
                            : DisparitySign::kNonPositive;
      const MatchResult bw = Matcher(cfg).Match(i2, i1);
      predicted = ClassifyByFbConsistency(fw.field, bw.field);
    } else {
      predicted = ClassifyByUncertainty(fw.confidence, a.sigma);
    }
  } else if (from_fb) {
    if (a.forward.empty() || a.backward.empty()) {
      throw UsageError("classify: need both --forward and --backward");
    }
    estimate = ReadField(a.forward, a.disparity);
    predicted = ClassifyByFbConsistency(estimate, ReadField(a.backward, a.disparity));
  } else {
    if (a.estimate.empty()) {
      throw UsageError("classify: --confidence needs --estimate");
    }
    estimate = ReadField(a.estimate, a.disparity);
    predicted = ClassifyByUncertainty(ReadConfidencePgm(a.confidence), a.sigma);
  }
  const Mask noc = a.noc.empty() ? Mask(gt.width(), gt.height(), true)
                                 : ReadMaskPng(a.noc);
  OutlierReport report = ScoreClassification(predicted, gt, estimate, noc);
  if (method == "uncertainty") report.sigma = a.sigma;
  out << "method=" << method << "\n";
  if (a.format != "kv") out << FormatOutlierTable(report);
  if (a.format != "table") out << OutlierKeyValues(report);
  return kExitOk;
}

// ---------------------------------------------------------------- propagate

struct PropagateArgs {
  MatchFlags flags;
  std::string labels;
  int classes = 0;
  std::vector<std::string> flows, frames, truth;
  std::string guidance = "vector";
  int steps = 0;
  std::string out_dir;
};

int RunPropagate(const PropagateArgs& a, std::ostream& out) {
  const LabelMap seed_labels = ReadLabelPng(a.labels);
  int classes = a.classes;
  if (classes <= 0) {
    for (int l : seed_labels.labels) classes = std::max(classes, l + 1);
    if (classes <= 0) throw std::invalid_argument("propagate: seed has no labels");
  }
  if (a.flows.empty() == a.frames.empty()) {
    throw UsageError("propagate: give exactly one of --flows or --frames");
  }
  if (!a.flows.empty() && a.guidance != "vector") {
    throw UsageError("propagate: precomputed --flows only support vector guidance");
  }
  if (!a.frames.empty() && a.frames.size() < 2) {
    throw UsageError("propagate: --frames needs at least two images");
  }

  std::vector<Guide> guides;
  if (!a.flows.empty()) {
    for (const auto& f : a.flows) guides.emplace_back(ReadField(f));
  } else {
    const Matcher matcher(a.flags.Config());
    ScalarImage prev = ReadImage(a.frames[0]);
    for (std::size_t i = 1; i < a.frames.size(); ++i) {
      ScalarImage next = ReadImage(a.frames[i]);
      const MatchResult r = matcher.Match(prev, next);
      if (a.guidance == "vector") {
        guides.emplace_back(VectorGuide(r));
      } else {
        guides.emplace_back(ProbabilisticGuide(r));
      }
      prev = std::move(next);
    }
  }
  if (a.steps > 0 && static_cast<std::size_t>(a.steps) < guides.size()) {
    guides.resize(a.steps);
  }
  if (!a.truth.empty() && a.truth.size() < guides.size()) {
    throw UsageError("propagate: need one --truth map per propagated frame");
  }

  const auto frames = PropagateSequence(
      LabelProbMap::FromLabels(seed_labels, classes), guides);
  if (!a.out_dir.empty()) fs::create_directories(a.out_dir);
  double iou_sum = 0.0, acc_sum = 0.0;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const LabelMap hard = HardLabels(frames[t]);
    std::size_t known = 0;
    for (int l : hard.labels) known += l != kUnknownLabel;
    out << "frame=" << t + 1 << " known=" << known;
    if (!a.truth.empty()) {
      const SegmentationScore s =
          ScoreSegmentation(hard, ReadLabelPng(a.truth[t]), classes);
      out << " miou=" << Fixed(s.mean_iou, 3) << " macc=" << Fixed(s.mean_acc, 3);
      iou_sum += s.mean_iou;
      acc_sum += s.mean_acc;
    }
    out << "\n";
    if (!a.out_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "labels_%03zu.png", t + 1);
      WriteLabelPng(fs::path(a.out_dir) / name, hard);
    }
  }
  if (!a.truth.empty() && !frames.empty()) {
    const double n = static_cast<double>(frames.size());
    out << "mean miou=" << Fixed(iou_sum / n, 3)
        << " macc=" << Fixed(acc_sum / n, 3) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::string input;
  std::string synthetic;
  std::vector<int> pixel;
  std::vector<double> gt;
  double max_displacement = FullDensityOptions{}.max_displacement;
  std::size_t max_paths = FullDensityOptions{}.max_paths;
  bool as_json = false;
};

Vec2 ReadVec(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 2) {
    throw std::invalid_argument("oracle: vectors are [dx] or [dx, dy]");
  }
  return {j[0].get<double>(), j.size() > 1 ? j[1].get<double>() : 0.0};
}

MatchDensity LevelFromJson(const json& j, const Support& support) {
  const int w = j.at("width").get<int>();
  const int h = j.at("height").get<int>();
  if (w < 1 || h < 1) throw std::invalid_argument("oracle: empty level");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  MatchDensity d(w, h, support);
  const auto fill_mass = [&](int x, int y, const json& m) {
    if (!m.is_array() || m.size() != static_cast<std::size_t>(support.size())) {
      throw std::invalid_argument("oracle: mass needs " +
                                  std::to_string(support.size()) + " entries");
    }
    auto dst = d.mass(x, y);
    for (int i = 0; i < support.size(); ++i) dst[i] = m[i].get<double>();
  };
  const auto fill_vec = [&](int x, int y, const json& v) {
    if (!SplatVector(ReadVec(v), support, d.mass(x, y))) d.Invalidate(x, y);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (j.contains("mass")) {
        fill_mass(x, y, j["mass"]);
      } else if (j.contains("masses")) {
        if (j["masses"].size() != n) throw std::invalid_argument("oracle: masses size");
        fill_mass(x, y, j["masses"][i]);
      } else if (j.contains("vector")) {
        fill_vec(x, y, j["vector"]);
      } else if (j.contains("vectors")) {
        if (j["vectors"].size() != n) throw std::invalid_argument("oracle: vectors size");
        fill_vec(x, y, j["vectors"][i]);
      } else {
        throw std::invalid_argument(
            "oracle: level needs mass, masses, vector or vectors");
      }
    }
  }
  return d;
}

struct OracleProblem {
  std::vector<MatchDensity> levels;
  std::optional<Vec2> gt;
};

OracleProblem ProblemFromJson(const json& j) {
  const std::string dim = j.value("dim", "flow");
  if (dim != "flow" && dim != "stereo") {
    throw std::invalid_argument("oracle: dim must be flow or stereo");
  }
  const Support s{j.value("radius", 1),
                  dim == "flow" ? FieldDim::kFlow : FieldDim::kStereo};
  if (s.radius < 1) throw std::invalid_argument("oracle: radius must be >= 1");
  OracleProblem p;
  for (const auto& level : j.at("levels")) p.levels.push_back(LevelFromJson(level, s));
  if (j.contains("gt")) p.gt = ReadVec(j["gt"]);
  return p;
}

OracleProblem SyntheticProblem(const std::string& kind, std::uint64_t seed) {
  const Support s{1, FieldDim::kFlow};
  const auto constant = [&](int w, int h, Vec2 v) {
    return VectorToDensity(MotionField::Constant(w, h, FieldDim::kFlow, v), s);
  };
  OracleProblem p;
  if (kind == "delta") {
    p.levels = {constant(1, 1, {1, 0}), constant(2, 2, {0, 1})};
  } else if (kind == "split") {
    p.levels = {constant(1, 1, {1, 0}), constant(2, 2, {0.5, 0})};
  } else {
    const Support wide{2, FieldDim::kFlow};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int size : {2, 4}) {
      MotionField f(size, size, FieldDim::kFlow);
      for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) f.Set(x, y, {uni(rng), uni(rng)});
      }
      p.levels.push_back(VectorToDensity(f, wide));
    }
  }
  return p;
}

int RunOracle(const OracleArgs& a, std::uint64_t seed, std::ostream& out) {
  if (a.input.empty() == a.synthetic.empty()) {
    throw UsageError("oracle: give exactly one of --input or --synthetic");
  }
  OracleProblem p;
  if (!a.input.empty()) {
    std::ifstream in(a.input);
    if (!in) throw std::invalid_argument("oracle: cannot open " + a.input);
    p = ProblemFromJson(json::parse(in));
  } else {
    p = SyntheticProblem(a.synthetic, seed);
  }
  if (!a.gt.empty()) {
    if (a.gt.size() > 2) throw UsageError("oracle: --gt takes one or two values");
    p.gt = Vec2{a.gt[0], a.gt.size() > 1 ? a.gt[1] : 0.0};
  }
  if (p.levels.empty()) throw std::invalid_argument("oracle: no levels");

  FullDensityOptions opt;
  opt.max_displacement = a.max_displacement;
  opt.max_paths = a.max_paths;
  const FullDensity full = ComposeFullDensity(p.levels, opt);

  std::optional<double> loglik;
  if (p.gt) {
    loglik = LogLikelihood(
        full, MotionField::Constant(full.width(), full.height(), full.dim(), *p.gt));
  }
  const bool one = a.pixel.size() == 2;
  if (one && (a.pixel[0] < 0 || a.pixel[1] < 0 || a.pixel[0] >= full.width() ||
              a.pixel[1] >= full.height())) {
    throw std::invalid_argument("oracle: --pixel outside the finest grid");
  }
  const int x0 = one ? a.pixel[0] : 0, x1 = one ? a.pixel[0] + 1 : full.width();
  const int y0 = one ? a.pixel[1] : 0, y1 = one ? a.pixel[1] + 1 : full.height();

  if (a.as_json) {
    json j;
    j["width"] = full.width();
    j["height"] = full.height();
    j["levels"] = p.levels.size();
    j["pixels"] = json::array();
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        json px = {{"x", x}, {"y", y}, {"valid", full.valid(x, y)},
                   {"truncated", full.truncated_mass(x, y)}};
        px["atoms"] = json::array();
        for (const auto& atom : full.atoms(x, y)) {
          px["atoms"].push_back({{"dx", atom.displacement.x},
                                 {"dy", atom.displacement.y},
                                 {"mass", atom.mass}});
        }
        j["pixels"].push_back(std::move(px));
      }
    }
    if (loglik) j["avg_loglik"] = *loglik;
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "oracle levels=" << p.levels.size() << " size=" << full.width() << "x"
      << full.height() << "\n";
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      out << "pixel x=" << x << " y=" << y;
      if (!full.valid(x, y)) {
        out << " invalid\n";
        continue;
      }
      out << " atoms=" << full.atoms(x, y).size()
          << " retained=" << Fixed(full.RetainedMass(x, y), 6)
          << " truncated=" << Fixed(full.truncated_mass(x, y), 6) << "\n";
      for (const auto& atom : full.atoms(x, y)) {
        out << "  dx=" << Fixed(atom.displacement.x, 6)
            << " dy=" << Fixed(atom.displacement.y, 6)
            << " mass=" << Fixed(atom.mass, 6) << "\n";
      }
    }
  }
  if (loglik) out << "avg_loglik=" << Fixed(*loglik, 6) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string kind = "flow";
  int width = 128, height = 128;
  int shift_x = 6, shift_y = 3;
  int disparity = 5;
  std::vector<int> band;
  std::string out_dir;
};

int RunSynth(const SynthArgs& a, std::uint64_t seed, std::ostream& out) {
  SyntheticPair p = a.kind == "stereo"
                        ? StereoPair(a.width, a.height, a.disparity, seed)
                        : TranslatedPair(a.width, a.height, a.shift_x, a.shift_y, seed);
  if (a.band.size() == 2) DestroyBand(p, a.band[0], a.band[1], seed + 1);
  const fs::path dir = a.out_dir;
  fs::create_directories(dir);
  WriteImagePng(dir / "frame1.png", p.frame1);
  WriteImagePng(dir / "frame2.png", p.frame2);
  const fs::path truth = dir / (a.kind == "stereo" ? "truth.png" : "truth.flo");
  WriteField(truth, p.truth);
  WriteMaskPng(dir / "noc.png", p.noc);
  WriteMaskPng(dir / "overlap.png", p.overlap);
  out << "synth " << a.kind << " " << a.width << "x" << a.height << " seed=" << seed
      << " -> " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Hierarchical discrete distribution decomposition matcher", "hd3"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "seed for randomized test data")
      ->capture_default_str();

  MatchArgs match;
  auto* match_cmd = app.add_subcommand("match", "match an image pair");
  match.flags.Add(match_cmd);
  match_cmd->add_option("image1", match.image1)->required()->check(CLI::ExistingFile);
  match_cmd->add_option("image2", match.image2)->required()->check(CLI::ExistingFile);
  match_cmd->add_option("-o,--output", match.output,
                        ".flo, or .png (KITTI flow or disparity)")
      ->required();
  match_cmd->add_option("--confidence", match.confidence,
                        "16-bit PGM confidence map");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "EPE and Fl of an estimate");
  eval_cmd->add_option("estimate", eval.estimate)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("truth", eval.truth)->required()->check(CLI::ExistingFile);
  eval_cmd->add_flag("--disparity", eval.disparity, "read PNGs as KITTI disparity");
  eval_cmd->add_flag("--json", eval.as_json, "print JSON");

  ClassifyArgs classify;
  auto* classify_cmd =
      app.add_subcommand("classify", "inlier/outlier classification scores");
  classify.flags.Add(classify_cmd);
  classify_cmd->add_option("--truth", classify.truth, "ground-truth field")
      ->required()
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--noc", classify.noc, "non-occluded mask PNG")
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--method", classify.method, "uncertainty or fb")
      ->check(CLI::IsMember({"uncertainty", "fb"}));
  classify_cmd->add_option("--confidence", classify.confidence, "confidence PGM")
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--estimate", classify.estimate, "estimated field")
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--forward", classify.forward, "forward field")
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--backward", classify.backward, "backward field")
      ->check(CLI::ExistingFile);
  classify_cmd->add_option("--image1", classify.image1)->check(CLI::ExistingFile);
  classify_cmd->add_option("--image2", classify.image2)->check(CLI::ExistingFile);
  classify_cmd->add_flag("--disparity", classify.disparity,
                         "read PNG fields as KITTI disparity");
  classify_cmd->add_option("--sigma", classify.sigma, "uncertainty threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  classify_cmd->add_option("--format", classify.format, "table, kv or both")
      ->check(CLI::IsMember({"table", "kv", "both"}))
      ->capture_default_str();

  PropagateArgs prop;
  auto* prop_cmd =
      app.add_subcommand("propagate", "propagate a label map along a sequence");
  prop.flags.Add(prop_cmd);
  prop_cmd->add_option("--labels", prop.labels, "seed label PNG (255 = unknown)")
      ->required()
      ->check(CLI::ExistingFile);
  prop_cmd->add_option("--classes", prop.classes,
                       "class count (default: largest seed label + 1)");
  prop_cmd->add_option("--flows", prop.flows, "precomputed flow per step")
      ->check(CLI::ExistingFile);
  prop_cmd->add_option("--frames", prop.frames, "images, seed frame first")
      ->check(CLI::ExistingFile);
  prop_cmd->add_option("--guidance", prop.guidance, "vector or probabilistic")
      ->check(CLI::IsMember({"vector", "probabilistic"}))
      ->capture_default_str();
  prop_cmd->add_option("--truth", prop.truth, "ground-truth labels per step")
      ->check(CLI::ExistingFile);
  prop_cmd->add_option("-T,--steps", prop.steps, "propagate at most T frames")
      ->check(CLI::NonNegativeNumber);
  prop_cmd->add_option("--out-dir", prop.out_dir, "write predicted label PNGs");

  OracleArgs oracle;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "exact full density on a tiny grid");
  oracle_cmd->add_option("--input", oracle.input, "JSON problem")
      ->check(CLI::ExistingFile);
  oracle_cmd->add_option("--synthetic", oracle.synthetic, "delta, split or random")
      ->check(CLI::IsMember({"delta", "split", "random"}));
  oracle_cmd->add_option("--pixel", oracle.pixel, "only this finest-level pixel")
      ->expected(2);
  oracle_cmd->add_option("--gt", oracle.gt, "constant ground truth for avg_loglik")
      ->expected(1, 2);
  oracle_cmd->add_option("--max-displacement", oracle.max_displacement)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  oracle_cmd->add_option("--max-paths", oracle.max_paths)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  oracle_cmd->add_flag("--json", oracle.as_json, "print JSON");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic pair");
  synth_cmd->add_option("--kind", synth.kind, "flow or stereo")
      ->check(CLI::IsMember({"flow", "stereo"}))
      ->capture_default_str();
  synth_cmd->add_option("--width", synth.width)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--height", synth.height)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--shift-x", synth.shift_x)->capture_default_str();
  synth_cmd->add_option("--shift-y", synth.shift_y)->capture_default_str();
  synth_cmd->add_option("--disparity", synth.disparity)->capture_default_str();
  synth_cmd->add_option("--band", synth.band, "destroy frame-2 columns [x0, x1)")
      ->expected(2);
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    if (app.get_subcommands().empty()) {
      // Name the stray word instead of CLI11's generic complaint.
      for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--seed") {
          ++i;
        } else if (!a.empty() && a[0] != '-') {
          what = "unknown subcommand '" + a + "'";
          break;
        }
      }
    }
    err << "error: " << what << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (match_cmd->parsed()) return RunMatch(match, out);
    if (eval_cmd->parsed()) return RunEval(eval, out);
    if (classify_cmd->parsed()) return RunClassify(classify, out);
    if (prop_cmd->parsed()) return RunPropagate(prop, out);
    if (oracle_cmd->parsed()) return RunOracle(oracle, seed, out);
    if (synth_cmd->parsed()) return RunSynth(synth, seed, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: bad JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hd3
