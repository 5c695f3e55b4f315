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

// Dense grid types shared by every stage of the matcher: motion fields,
// scalar images, the x2 pyramid operators on motion fields, and backward
// warping.

#ifndef HD3_FIELD_H_
#define HD3_FIELD_H_

#include <array>
#include <cstdint>
#include <vector>

namespace hd3 {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

double Norm(Vec2 v);

// Number of displacement components carried by a field. Stereo fields are
// 1D flow: only the horizontal component is meaningful, the vertical one is
// held at zero.
enum class FieldDim : int { kStereo = 1, kFlow = 2 };

// Per-pixel displacement in pixels of the field's own resolution, plus a
// validity mask. Storage is row-major.
class MotionField {
 public:
  MotionField() = default;
  MotionField(int width, int height, FieldDim dim);

  static MotionField Constant(int width, int height, FieldDim dim, Vec2 value);

  int width() const { return width_; }
  int height() const { return height_; }
  FieldDim dim() const { return dim_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  std::size_t size() const { return vectors_.size(); }

  Vec2 at(int x, int y) const { return vectors_[Index(x, y)]; }
  bool valid(int x, int y) const { return valid_[Index(x, y)] != 0; }

  // Stores v; the vertical component is dropped for stereo fields.
  void Set(int x, int y, Vec2 v);
  void SetValid(int x, int y, bool valid) { valid_[Index(x, y)] = valid; }
  void Invalidate(int x, int y);

  bool AllValid() const;
  std::size_t CountValid() const;
  bool SameShape(const MotionField& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  FieldDim dim_ = FieldDim::kFlow;
  std::vector<Vec2> vectors_;
  std::vector<std::uint8_t> valid_;
};

// Interleaved multi-channel raster.
class ScalarImage {
 public:
  ScalarImage() = default;
  ScalarImage(int width, int height, int channels = 1, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool SameShape(const ScalarImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  double at(int x, int y, int c = 0) const { return values_[Index(x, y, c)]; }
  double& at(int x, int y, int c = 0) { return values_[Index(x, y, c)]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  std::size_t Index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> values_;
};

// Row-major boolean raster.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  Mask() = default;
  Mask(int w, int h, bool fill = false)
      : width(w), height(h),
        values(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    values[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t Count() const;
};

// One corner of a bilinear footprint.
struct BilinearTap {
  int x = 0;
  int y = 0;
  double weight = 0.0;
};

// Taps of a bilinear sample at (px, py), in row-major corner order
// (x0,y0), (x0+1,y0), (x0,y0+1), (x0+1,y0+1). Weights sum to 1.
std::array<BilinearTap, 4> BilinearTaps(double px, double py);

// True when every tap with nonzero weight lies inside a width x height grid.
bool TapsInside(const std::array<BilinearTap, 4>& taps, int width, int height);

// phi: x2 bilinear upsampling with half-pixel (align-corners-false) phase.
// Magnitudes are doubled so vectors stay in output-resolution pixels. An
// output pixel is valid iff every source pixel it reads with nonzero weight
// is valid.
MotionField UpsampleField(const MotionField& field);

// phi^-1 for a power-of-two factor. Fully valid (dense) fields are resampled
// bilinearly at half-pixel phase; fields with any invalid pixel are treated
// as sparse and average-pooled over the valid pixels of each factor x factor
// block. Magnitudes are scaled by 1/factor.
//
// Throws std::invalid_argument for a non-power-of-two factor or one that does
// not divide the field size.
MotionField DownsampleField(const MotionField& field, int factor);

struct WarpResult {
  ScalarImage image;
  Mask valid;
};

// output(x) = bilinear sample of image at x + field(x). Samples that need a
// pixel outside the image, or pixels where the field is invalid, come back
// invalid and zero-filled.
WarpResult WarpBackward(const ScalarImage& image, const MotionField& field);

// Pointwise a + b over pixels valid in both; other pixels invalid.
MotionField AddFields(const MotionField& a, const MotionField& b);
MotionField SubtractFields(const MotionField& a, const MotionField& b);
MotionField ScaleField(const MotionField& field, double s);

}  // namespace hd3

#endif  // HD3_FIELD_H_
