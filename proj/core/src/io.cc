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

#include "hd3/io.h"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace hd3 {

namespace {

static_assert(std::endian::native == std::endian::little,
              ".flo encoding assumes a little-endian host");

constexpr char kFloMagic[4] = {'P', 'I', 'E', 'H'};
constexpr int kMaxSide = 1 << 16;

template <typename T>
void PutLE(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <typename T>
T GetLE(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

std::vector<std::uint8_t> ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteAll(const std::filesystem::path& path,
              const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// libpng reports errors by longjmp; these two keep every C++ object with a
// destructor outside the frame that calls setjmp.
struct PngReadState {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;
  char error[256] = {};
};

void PngErrorFn(png_structp png, png_const_charp msg) {
  auto* err = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(err, 256, "%s", msg);
  png_longjmp(png, 1);
}

void PngWarningFn(png_structp, png_const_charp) {}

bool PngReadHeader(png_structp png, png_infop info, std::FILE* fp,
                   PngReadState* st) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_info(png, info);
  png_get_IHDR(png, info, &st->width, &st->height, &st->bit_depth,
               &st->color_type, nullptr, nullptr, nullptr);
  if (st->bit_depth < 8) png_set_packing(png);
  if (st->bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);
  st->channels = png_get_channels(png, info);
  return true;
}

bool PngReadRows(png_structp png, png_infop info, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, info);
  return true;
}

bool PngWriteAll(png_structp png, png_infop info, std::FILE* fp, int width,
                 int height, int bit_depth, int color_type, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::vector<std::uint8_t> EncodeFlo(const MotionField& field) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + field.size() * 8);
  out.insert(out.end(), kFloMagic, kFloMagic + 4);
  PutLE<std::int32_t>(out, field.width());
  PutLE<std::int32_t>(out, field.height());
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (field.valid(x, y)) {
        const Vec2 v = field.at(x, y);
        PutLE<float>(out, static_cast<float>(v.x));
        PutLE<float>(out, static_cast<float>(v.y));
      } else {
        PutLE<float>(out, kFloUnknown);
        PutLE<float>(out, kFloUnknown);
      }
    }
  }
  return out;
}

MotionField DecodeFlo(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12) throw FormatError(".flo: truncated header");
  if (std::memcmp(bytes.data(), kFloMagic, 4) != 0) {
    throw FormatError(".flo: bad magic tag");
  }
  const auto w = GetLE<std::int32_t>(bytes.data() + 4);
  const auto h = GetLE<std::int32_t>(bytes.data() + 8);
  if (w < 0 || h < 0 || w > kMaxSide || h > kMaxSide) {
    throw FormatError(".flo: implausible size " + std::to_string(w) + "x" +
                      std::to_string(h));
  }
  const std::size_t need = 12 + static_cast<std::size_t>(w) * h * 8;
  if (bytes.size() < need) throw FormatError(".flo: truncated data");
  MotionField f(w, h, FieldDim::kFlow);
  const std::uint8_t* p = bytes.data() + 12;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, p += 8) {
      const float u = GetLE<float>(p);
      const float v = GetLE<float>(p + 4);
      if (!std::isfinite(u) || !std::isfinite(v) || std::abs(u) > 1e9f ||
          std::abs(v) > 1e9f) {
        f.Invalidate(x, y);
      } else {
        f.Set(x, y, {u, v});
      }
    }
  }
  return f;
}

void WriteFlo(const std::filesystem::path& path, const MotionField& field) {
  WriteAll(path, EncodeFlo(field));
}

MotionField ReadFlo(const std::filesystem::path& path) {
  return DecodeFlo(ReadAll(path));
}

PngData ReadPng(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw FormatError("cannot open " + path.string());
  PngReadState st;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, st.error,
                                           PngErrorFn, PngWarningFn);
  if (!png) throw FormatError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  const auto cleanup = [&] { png_destroy_read_struct(&png, &info, nullptr); };
  if (!info || !PngReadHeader(png, info, fp.get(), &st)) {
    cleanup();
    throw FormatError(path.string() + ": " + st.error);
  }
  if (st.width > kMaxSide || st.height > kMaxSide) {
    cleanup();
    throw FormatError(path.string() + ": image too large");
  }
  PngData out;
  out.width = static_cast<int>(st.width);
  out.height = static_cast<int>(st.height);
  out.channels = st.channels;
  out.bit_depth = st.bit_depth == 16 ? 16 : 8;
  out.palette = st.color_type == PNG_COLOR_TYPE_PALETTE;

  const std::size_t bytes_per_sample = out.bit_depth / 8;
  const std::size_t row_bytes =
      static_cast<std::size_t>(out.width) * out.channels * bytes_per_sample;
  std::vector<png_byte> buffer(row_bytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = buffer.data() + y * row_bytes;
  if (!PngReadRows(png, info, rows.data())) {
    cleanup();
    throw FormatError(path.string() + ": " + st.error);
  }
  cleanup();

  out.samples.resize(static_cast<std::size_t>(out.width) * out.height *
                     out.channels);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    if (out.bit_depth == 16) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      out.samples[i] = v;
    } else {
      out.samples[i] = buffer[i];
    }
  }
  return out;
}

void WritePng(const std::filesystem::path& path, const PngData& data) {
  if (data.bit_depth != 8 && data.bit_depth != 16) {
    throw FormatError("png: bit depth must be 8 or 16");
  }
  int color_type = 0;
  switch (data.channels) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default: throw FormatError("png: unsupported channel count");
  }
  const std::size_t bps = data.bit_depth / 8;
  const std::size_t row_bytes =
      static_cast<std::size_t>(data.width) * data.channels * bps;
  std::vector<png_byte> buffer(row_bytes * data.height);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (bps == 2) {
      std::memcpy(buffer.data() + 2 * i, &data.samples[i], 2);
    } else {
      buffer[i] = static_cast<png_byte>(std::min<std::uint16_t>(data.samples[i], 255));
    }
  }
  std::vector<png_bytep> rows(data.height);
  for (int y = 0; y < data.height; ++y) rows[y] = buffer.data() + y * row_bytes;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw FormatError("cannot create " + path.string());
  char error[256] = {};
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, error,
                                            PngErrorFn, PngWarningFn);
  if (!png) throw FormatError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  const bool ok = info && PngWriteAll(png, info, fp.get(), data.width,
                                      data.height, data.bit_depth, color_type,
                                      rows.data());
  png_destroy_write_struct(&png, &info);
  if (!ok) throw FormatError(path.string() + ": " + error);
}

std::array<std::uint16_t, 3> EncodeKittiFlow(Vec2 v, bool valid) {
  if (!valid) return {0, 0, 0};
  const auto enc = [](double c) {
    return static_cast<std::uint16_t>(
        std::clamp(std::round(c * 64.0 + 32768.0), 0.0, 65535.0));
  };
  return {enc(v.x), enc(v.y), 1};
}

void WriteKittiFlow(const std::filesystem::path& path, const MotionField& field) {
  PngData png{field.width(), field.height(), 3, 16, false, {}};
  png.samples.reserve(field.size() * 3);
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      const auto raw = EncodeKittiFlow(field.at(x, y), field.valid(x, y));
      png.samples.insert(png.samples.end(), raw.begin(), raw.end());
    }
  }
  WritePng(path, png);
}

MotionField ReadKittiFlow(const std::filesystem::path& path) {
  const PngData png = ReadPng(path);
  if (png.bit_depth != 16) {
    throw FormatError(path.string() + ": KITTI flow must be 16-bit");
  }
  if (png.channels < 3) {
    throw FormatError(path.string() + ": KITTI flow needs 3 channels");
  }
  MotionField f(png.width, png.height, FieldDim::kFlow);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::size_t i =
          (static_cast<std::size_t>(y) * png.width + x) * png.channels;
      if (png.samples[i + 2] == 0) {
        f.Invalidate(x, y);
        continue;
      }
      f.Set(x, y, {(png.samples[i] - 32768.0) / 64.0,
                   (png.samples[i + 1] - 32768.0) / 64.0});
    }
  }
  return f;
}

std::uint16_t EncodeKittiDisparity(double disparity) {
  return static_cast<std::uint16_t>(
      std::clamp(std::round(disparity * 256.0), 0.0, 65535.0));
}

void WriteKittiDisparity(const std::filesystem::path& path,
                         const MotionField& stereo) {
  PngData png{stereo.width(), stereo.height(), 1, 16, false, {}};
  png.samples.reserve(stereo.size());
  for (int y = 0; y < stereo.height(); ++y) {
    for (int x = 0; x < stereo.width(); ++x) {
      png.samples.push_back(stereo.valid(x, y)
                                ? EncodeKittiDisparity(-stereo.at(x, y).x)
                                : 0);
    }
  }
  WritePng(path, png);
}

MotionField ReadKittiDisparity(const std::filesystem::path& path) {
  const PngData png = ReadPng(path);
  if (png.bit_depth != 16) {
    throw FormatError(path.string() + ": KITTI disparity must be 16-bit");
  }
  MotionField f(png.width, png.height, FieldDim::kStereo);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::uint16_t raw =
          png.samples[(static_cast<std::size_t>(y) * png.width + x) * png.channels];
      if (raw == 0) {
        f.Invalidate(x, y);
      } else {
        f.Set(x, y, {-raw / 256.0, 0.0});
      }
    }
  }
  return f;
}

namespace {

ScalarImage ReadPgm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = ReadAll(path);
  std::size_t pos = 0;
  const auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) {
      tok += static_cast<char>(bytes[pos++]);
    }
    return tok;
  };
  if (next_token() != "P5") throw FormatError(path.string() + ": not a binary PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || w > kMaxSide || h > kMaxSide || maxval <= 0 ||
      maxval > 65535) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  ++pos;  // single whitespace before the raster
  const int bps = maxval > 255 ? 2 : 1;
  if (bytes.size() < pos + static_cast<std::size_t>(w) * h * bps) {
    throw FormatError(path.string() + ": truncated PGM");
  }
  ScalarImage img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = pos + (static_cast<std::size_t>(y) * w + x) * bps;
      const int v = bps == 2 ? (bytes[i] << 8) | bytes[i + 1] : bytes[i];
      img.at(x, y) = static_cast<double>(v) / maxval;
    }
  }
  return img;
}

}  // namespace

ScalarImage ReadImage(const std::filesystem::path& path) {
  const std::string ext = Lower(path.extension().string());
  if (ext == ".pgm") return ReadPgm(path);
  const PngData png = ReadPng(path);
  if (png.palette) throw FormatError(path.string() + ": palette images are labels");
  const double scale = png.bit_depth == 16 ? 65535.0 : 255.0;
  ScalarImage img(png.width, png.height, png.channels);
  for (std::size_t i = 0; i < png.samples.size(); ++i) {
    img.values()[i] = png.samples[i] / scale;
  }
  return img;
}

void WriteImagePng(const std::filesystem::path& path, const ScalarImage& image) {
  PngData png{image.width(), image.height(), image.channels(), 16, false, {}};
  png.samples.reserve(image.values().size());
  for (double v : image.values()) {
    png.samples.push_back(
        static_cast<std::uint16_t>(std::round(Clamp01(v) * 65535.0)));
  }
  WritePng(path, png);
}

void WriteConfidencePgm(const std::filesystem::path& path,
                        const ScalarImage& confidence) {
  std::vector<std::uint8_t> out;
  const std::string header = "P5\n" + std::to_string(confidence.width()) + " " +
                             std::to_string(confidence.height()) + "\n65535\n";
  out.assign(header.begin(), header.end());
  for (int y = 0; y < confidence.height(); ++y) {
    for (int x = 0; x < confidence.width(); ++x) {
      const auto v = static_cast<std::uint16_t>(
          std::round(Clamp01(confidence.at(x, y)) * 65535.0));
      out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
  }
  WriteAll(path, out);
}

ScalarImage ReadConfidencePgm(const std::filesystem::path& path) {
  return ReadPgm(path);
}

LabelMap ReadLabelPng(const std::filesystem::path& path) {
  const PngData png = ReadPng(path);
  if (png.bit_depth != 8) throw FormatError(path.string() + ": labels must be 8-bit");
  LabelMap labels(png.width, png.height);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const int v = png.samples[i * png.channels];
    labels.labels[i] = v == kLabelUnknownIndex ? kUnknownLabel : v;
  }
  return labels;
}

void WriteLabelPng(const std::filesystem::path& path, const LabelMap& labels) {
  PngData png{labels.width, labels.height, 1, 8, false, {}};
  png.samples.reserve(labels.labels.size());
  for (int v : labels.labels) {
    if (v != kUnknownLabel && (v < 0 || v >= kLabelUnknownIndex)) {
      throw FormatError("label " + std::to_string(v) + " does not fit 8 bits");
    }
    png.samples.push_back(static_cast<std::uint16_t>(
        v == kUnknownLabel ? kLabelUnknownIndex : v));
  }
  WritePng(path, png);
}

Mask ReadMaskPng(const std::filesystem::path& path) {
  const PngData png = ReadPng(path);
  Mask m(png.width, png.height);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    m.values[i] = png.samples[i * png.channels] != 0;
  }
  return m;
}

void WriteMaskPng(const std::filesystem::path& path, const Mask& mask) {
  PngData png{mask.width, mask.height, 1, 8, false, {}};
  png.samples.reserve(mask.values.size());
  for (auto v : mask.values) png.samples.push_back(v ? 255 : 0);
  WritePng(path, png);
}

MotionField ReadField(const std::filesystem::path& path, bool disparity) {
  const std::string ext = Lower(path.extension().string());
  if (ext == ".flo") return ReadFlo(path);
  if (ext == ".png") return disparity ? ReadKittiDisparity(path) : ReadKittiFlow(path);
  throw FormatError(path.string() + ": unknown field format (want .flo or .png)");
}

void WriteField(const std::filesystem::path& path, const MotionField& field) {
  const std::string ext = Lower(path.extension().string());
  if (ext == ".flo") {
    WriteFlo(path, field);
  } else if (ext == ".png") {
    if (field.dim() == FieldDim::kStereo) {
      WriteKittiDisparity(path, field);
    } else {
      WriteKittiFlow(path, field);
    }
  } else {
    throw FormatError(path.string() + ": unknown field format (want .flo or .png)");
  }
}

}  // namespace hd3
