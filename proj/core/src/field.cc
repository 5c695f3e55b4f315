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

#include "hd3/field.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hd3 {

namespace {

struct Taps1D {
  int i0 = 0;
  int i1 = 0;
  double w0 = 1.0;
  double w1 = 0.0;
};

// Half-pixel-phase linear taps for sampling a length-n signal at source
// coordinate src, with the coordinate clamped to [0, n-1].
Taps1D ClampedTaps(double src, int n) {
  src = std::clamp(src, 0.0, static_cast<double>(n - 1));
  Taps1D t;
  t.i0 = static_cast<int>(std::floor(src));
  t.i1 = std::min(t.i0 + 1, n - 1);
  t.w1 = src - t.i0;
  t.w0 = 1.0 - t.w1;
  return t;
}

bool IsPowerOfTwo(int v) { return v > 0 && (v & (v - 1)) == 0; }

template <typename Op>
MotionField Combine(const MotionField& a, const MotionField& b, Op op) {
  if (!a.SameShape(b)) {
    throw std::invalid_argument("field size mismatch");
  }
  const FieldDim dim =
      (a.dim() == FieldDim::kFlow || b.dim() == FieldDim::kFlow)
          ? FieldDim::kFlow
          : FieldDim::kStereo;
  MotionField out(a.width(), a.height(), dim);
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a.valid(x, y) && b.valid(x, y)) {
        out.Set(x, y, op(a.at(x, y), b.at(x, y)));
      } else {
        out.Invalidate(x, y);
      }
    }
  }
  return out;
}

}  // namespace

double Norm(Vec2 v) { return std::hypot(v.x, v.y); }

MotionField::MotionField(int width, int height, FieldDim dim)
    : width_(width), height_(height), dim_(dim) {
  if (width < 0 || height < 0) {
    throw std::invalid_argument("negative field size");
  }
  const auto n = static_cast<std::size_t>(width) * height;
  vectors_.assign(n, Vec2{});
  valid_.assign(n, 1);
}

MotionField MotionField::Constant(int width, int height, FieldDim dim,
                                  Vec2 value) {
  MotionField f(width, height, dim);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) f.Set(x, y, value);
  }
  return f;
}

void MotionField::Set(int x, int y, Vec2 v) {
  if (dim_ == FieldDim::kStereo) v.y = 0.0;
  vectors_[Index(x, y)] = v;
}

void MotionField::Invalidate(int x, int y) {
  vectors_[Index(x, y)] = Vec2{};
  valid_[Index(x, y)] = 0;
}

bool MotionField::AllValid() const {
  return std::all_of(valid_.begin(), valid_.end(),
                     [](std::uint8_t v) { return v != 0; });
}

std::size_t MotionField::CountValid() const {
  return static_cast<std::size_t>(
      std::count_if(valid_.begin(), valid_.end(),
                    [](std::uint8_t v) { return v != 0; }));
}

ScalarImage::ScalarImage(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels <= 0) {
    throw std::invalid_argument("bad image shape");
  }
  values_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

std::size_t Mask::Count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(),
                    [](std::uint8_t v) { return v != 0; }));
}

std::array<BilinearTap, 4> BilinearTaps(double px, double py) {
  const double fx0 = std::floor(px);
  const double fy0 = std::floor(py);
  const double ax = px - fx0;
  const double ay = py - fy0;
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  return {{{x0, y0, (1.0 - ax) * (1.0 - ay)},
           {x0 + 1, y0, ax * (1.0 - ay)},
           {x0, y0 + 1, (1.0 - ax) * ay},
           {x0 + 1, y0 + 1, ax * ay}}};
}

bool TapsInside(const std::array<BilinearTap, 4>& taps, int width,
                int height) {
  for (const auto& t : taps) {
    if (t.weight == 0.0) continue;
    if (t.x < 0 || t.y < 0 || t.x >= width || t.y >= height) return false;
  }
  return true;
}

MotionField UpsampleField(const MotionField& field) {
  const int w = field.width();
  const int h = field.height();
  MotionField out(2 * w, 2 * h, field.dim());
  if (field.empty()) return out;

  std::vector<Taps1D> xt(2 * w);
  std::vector<Taps1D> yt(2 * h);
  for (int X = 0; X < 2 * w; ++X) xt[X] = ClampedTaps((X + 0.5) / 2.0 - 0.5, w);
  for (int Y = 0; Y < 2 * h; ++Y) yt[Y] = ClampedTaps((Y + 0.5) / 2.0 - 0.5, h);

  for (int Y = 0; Y < 2 * h; ++Y) {
    const Taps1D& ty = yt[Y];
    for (int X = 0; X < 2 * w; ++X) {
      const Taps1D& tx = xt[X];
      const std::array<BilinearTap, 4> taps = {{
          {tx.i0, ty.i0, tx.w0 * ty.w0},
          {tx.i1, ty.i0, tx.w1 * ty.w0},
          {tx.i0, ty.i1, tx.w0 * ty.w1},
          {tx.i1, ty.i1, tx.w1 * ty.w1},
      }};
      Vec2 acc;
      bool ok = true;
      for (const auto& t : taps) {
        if (t.weight == 0.0) continue;
        if (!field.valid(t.x, t.y)) {
          ok = false;
          break;
        }
        acc = acc + t.weight * field.at(t.x, t.y);
      }
      if (ok) {
        out.Set(X, Y, 2.0 * acc);
      } else {
        out.Invalidate(X, Y);
      }
    }
  }
  return out;
}

MotionField DownsampleField(const MotionField& field, int factor) {
  if (!IsPowerOfTwo(factor)) {
    throw std::invalid_argument("downsample factor must be a power of two, got " +
                                std::to_string(factor));
  }
  if (field.width() % factor != 0 || field.height() % factor != 0) {
    throw std::invalid_argument("downsample factor " + std::to_string(factor) +
                                " does not divide field size");
  }
  if (factor == 1) return field;

  const int w = field.width() / factor;
  const int h = field.height() / factor;
  const double scale = 1.0 / factor;
  MotionField out(w, h, field.dim());

  if (field.AllValid()) {
    for (int y = 0; y < h; ++y) {
      const Taps1D ty = ClampedTaps((y + 0.5) * factor - 0.5, field.height());
      for (int x = 0; x < w; ++x) {
        const Taps1D tx = ClampedTaps((x + 0.5) * factor - 0.5, field.width());
        const Vec2 v = tx.w0 * ty.w0 * field.at(tx.i0, ty.i0) +
                       tx.w1 * ty.w0 * field.at(tx.i1, ty.i0) +
                       tx.w0 * ty.w1 * field.at(tx.i0, ty.i1) +
                       tx.w1 * ty.w1 * field.at(tx.i1, ty.i1);
        out.Set(x, y, scale * v);
      }
    }
    return out;
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Vec2 sum;
      int count = 0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) {
          const int sx = x * factor + dx;
          const int sy = y * factor + dy;
          if (!field.valid(sx, sy)) continue;
          sum = sum + field.at(sx, sy);
          ++count;
        }
      }
      if (count == 0) {
        out.Invalidate(x, y);
      } else {
        out.Set(x, y, (scale / count) * sum);
      }
    }
  }
  return out;
}

WarpResult WarpBackward(const ScalarImage& image, const MotionField& field) {
  if (image.width() != field.width() || image.height() != field.height()) {
    throw std::invalid_argument("warp: image and field size mismatch");
  }
  const int w = image.width();
  const int h = image.height();
  const int c = image.channels();
  WarpResult r{ScalarImage(w, h, c), Mask(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!field.valid(x, y)) continue;
      const Vec2 d = field.at(x, y);
      const auto taps = BilinearTaps(x + d.x, y + d.y);
      if (!TapsInside(taps, w, h)) continue;
      for (int ch = 0; ch < c; ++ch) {
        double v = 0.0;
        for (const auto& t : taps) {
          if (t.weight != 0.0) v += t.weight * image.at(t.x, t.y, ch);
        }
        r.image.at(x, y, ch) = v;
      }
      r.valid.set(x, y, true);
    }
  }
  return r;
}

MotionField AddFields(const MotionField& a, const MotionField& b) {
  return Combine(a, b, [](Vec2 p, Vec2 q) { return p + q; });
}

MotionField SubtractFields(const MotionField& a, const MotionField& b) {
  return Combine(a, b, [](Vec2 p, Vec2 q) { return p - q; });
}

MotionField ScaleField(const MotionField& field, double s) {
  MotionField out = field;
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (field.valid(x, y)) out.Set(x, y, s * field.at(x, y));
    }
  }
  return out;
}

}  // namespace hd3
