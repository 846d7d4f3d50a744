// Copyright 2026 The smad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Raster planes, image decoding and the HSV + YCbCr channel decomposition.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "smad/error.hpp"

namespace smad {

struct Dims {
  int width = 0;
  int height = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Row-major single-channel raster of real intensities.
struct ImagePlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ImagePlane() = default;
  ImagePlane(int w, int h, double fill = 0.0) : width(w), height(h), data(std::size_t(w) * std::size_t(h), fill) {
    require(w >= 0 && h >= 0, Errc::invalid, "negative plane dimensions");
  }
  explicit ImagePlane(Dims d, double fill = 0.0) : ImagePlane(d.width, d.height, fill) {}

  Dims dims() const { return {width, height}; }
  std::size_t size() const { return data.size(); }
  double& at(int x, int y) { return data[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
  double at(int x, int y) const { return data[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
  const double* row(int y) const { return data.data() + std::size_t(y) * std::size_t(width); }
  double* row(int y) { return data.data() + std::size_t(y) * std::size_t(width); }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;
};

struct RgbImage {
  ImagePlane r, g, b;
  Dims dims() const { return r.dims(); }
};

enum class Channel { H = 0, S, V, Y, Cb, Cr };
inline constexpr int kNumChannels = 6;
inline constexpr std::array<std::string_view, kNumChannels> kChannelNames{"H", "S", "V", "Y", "Cb", "Cr"};

/// The six color representations of one input in fixed order H,S,V,Y,Cb,Cr.
struct ColorStack {
  std::array<ImagePlane, kNumChannels> channels;
  std::string source_id;

  const ImagePlane& operator[](Channel c) const { return channels[static_cast<int>(c)]; }
  ImagePlane& operator[](Channel c) { return channels[static_cast<int>(c)]; }
};

namespace detail {

inline std::string lower_extension(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return char(std::tolower(ch)); });
  return ext;
}

inline void require_same_dims(const ImagePlane& a, const ImagePlane& b, const ImagePlane& c, const char* op) {
  if (a.dims() != b.dims() || a.dims() != c.dims())
    fail(Errc::invalid, std::string(op) + ": channel dimension mismatch");
}

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

inline bool is_supported_image(const std::filesystem::path& p) {
  auto ext = detail::lower_extension(p);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// Decodes a PNG or JPEG colour image into three planes scaled to [0,1].
inline RgbImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) fail(Errc::io, "image not found: " + path.string());
  if (!is_supported_image(path)) fail(Errc::format, "unsupported image format (PNG/JPEG only): " + path.string());
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
  if (m.empty()) fail(Errc::format, "cannot decode image: " + path.string());
  if (m.channels() != 3)
    fail(Errc::format, "expected a 3-channel colour image, got " + std::to_string(m.channels()) +
                           " channel(s): " + path.string());
  double scale;
  switch (m.depth()) {
    case CV_8U: scale = 1.0 / 255.0; break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    default: fail(Errc::format, "unsupported sample depth: " + path.string());
  }
  cv::Mat f;
  m.convertTo(f, CV_64FC3, scale);
  RgbImage img{ImagePlane(f.cols, f.rows), ImagePlane(f.cols, f.rows), ImagePlane(f.cols, f.rows)};
  for (int y = 0; y < f.rows; ++y) {
    const auto* src = f.ptr<cv::Vec3d>(y);
    for (int x = 0; x < f.cols; ++x) {
      // OpenCV decodes to BGR.
      img.b.at(x, y) = detail::clamp01(src[x][0]);
      img.g.at(x, y) = detail::clamp01(src[x][1]);
      img.r.at(x, y) = detail::clamp01(src[x][2]);
    }
  }
  return img;
}

/// Quantizes to 8 bits and encodes by extension; `jpeg_quality` applies to .jpg/.jpeg.
inline void save_image(const std::filesystem::path& path, const RgbImage& img, int jpeg_quality = 95) {
  if (!is_supported_image(path)) fail(Errc::format, "unsupported output format: " + path.string());
  const auto d = img.dims();
  cv::Mat m(d.height, d.width, CV_8UC3);
  for (int y = 0; y < d.height; ++y) {
    auto* dst = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < d.width; ++x) {
      auto q = [](double v) { return cv::saturate_cast<unsigned char>(std::lround(detail::clamp01(v) * 255.0)); };
      dst[x] = cv::Vec3b(q(img.b.at(x, y)), q(img.g.at(x, y)), q(img.r.at(x, y)));
    }
  }
  std::vector<int> params;
  auto ext = detail::lower_extension(path);
  if (ext == ".jpg" || ext == ".jpeg") params = {cv::IMWRITE_JPEG_QUALITY, jpeg_quality};
  else params = {cv::IMWRITE_PNG_COMPRESSION, 6};
  std::vector<unsigned char> bytes;
  if (!cv::imencode(ext, m, bytes, params)) fail(Errc::io, "cannot encode image: " + path.string());
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) fail(Errc::io, "cannot write image: " + path.string());
  auto n = std::fwrite(bytes.data(), 1, bytes.size(), fp);
  std::fclose(fp);
  if (n != bytes.size()) fail(Errc::io, "short write: " + path.string());
}

/// Bilinear resampling with pixel-centre alignment and edge clamping.
inline ImagePlane resize_bilinear(const ImagePlane& src, Dims to) {
  require(src.width > 0 && src.height > 0 && to.width > 0 && to.height > 0, Errc::invalid,
          "resize_bilinear: empty plane or target");
  if (src.dims() == to) return src;
  ImagePlane out(to);
  const double sx = double(src.width) / to.width;
  const double sy = double(src.height) / to.height;
  for (int y = 0; y < to.height; ++y) {
    double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(src.height - 1));
    int y0 = int(fy);
    int y1 = std::min(y0 + 1, src.height - 1);
    double wy = fy - y0;
    for (int x = 0; x < to.width; ++x) {
      double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(src.width - 1));
      int x0 = int(fx);
      int x1 = std::min(x0 + 1, src.width - 1);
      double wx = fx - x0;
      double top = src.at(x0, y0) * (1 - wx) + src.at(x1, y0) * wx;
      double bot = src.at(x0, y1) * (1 - wx) + src.at(x1, y1) * wx;
      out.at(x, y) = top * (1 - wy) + bot * wy;
    }
  }
  return out;
}

inline RgbImage resize_bilinear(const RgbImage& img, Dims to) {
  return {resize_bilinear(img.r, to), resize_bilinear(img.g, to), resize_bilinear(img.b, to)};
}

/// Keeps the central `fraction` of each axis (1.0 keeps everything).
inline RgbImage center_crop(const RgbImage& img, double fraction) {
  require(fraction > 0.0 && fraction <= 1.0, Errc::invalid, "crop fraction must be in (0,1]");
  if (fraction == 1.0) return img;
  const auto d = img.dims();
  int w = std::max(1, int(std::lround(d.width * fraction)));
  int h = std::max(1, int(std::lround(d.height * fraction)));
  int x0 = (d.width - w) / 2, y0 = (d.height - h) / 2;
  auto crop = [&](const ImagePlane& p) {
    ImagePlane out(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(x, y) = p.at(x0 + x, y0 + y);
    return out;
  };
  return {crop(img.r), crop(img.g), crop(img.b)};
}

struct HsvPlanes {
  ImagePlane h, s, v;
};
struct YcbcrPlanes {
  ImagePlane y, cb, cr;
};

/// Hexcone HSV. Hue is stored as degrees/360; achromatic pixels get hue 0.
inline HsvPlanes rgb_to_hsv(const ImagePlane& r, const ImagePlane& g, const ImagePlane& b) {
  detail::require_same_dims(r, g, b, "rgb_to_hsv");
  HsvPlanes out{ImagePlane(r.dims()), ImagePlane(r.dims()), ImagePlane(r.dims())};
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double R = r.data[i], G = g.data[i], B = b.data[i];
    const double mx = std::max({R, G, B});
    const double mn = std::min({R, G, B});
    const double c = mx - mn;
    double h = 0.0;
    if (c > 0.0) {
      if (mx == R) h = (G - B) / c;
      else if (mx == G) h = (B - R) / c + 2.0;
      else h = (R - G) / c + 4.0;
      if (h < 0.0) h += 6.0;
      h /= 6.0;
      if (h >= 1.0) h -= 1.0;
    }
    out.h.data[i] = detail::clamp01(h);
    out.s.data[i] = mx > 0.0 ? detail::clamp01(c / mx) : 0.0;
    out.v.data[i] = detail::clamp01(mx);
  }
  return out;
}

/// Full-range BT.601 with chroma centred on 0.5.
inline YcbcrPlanes rgb_to_ycbcr(const ImagePlane& r, const ImagePlane& g, const ImagePlane& b) {
  detail::require_same_dims(r, g, b, "rgb_to_ycbcr");
  YcbcrPlanes out{ImagePlane(r.dims()), ImagePlane(r.dims()), ImagePlane(r.dims())};
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double R = r.data[i], G = g.data[i], B = b.data[i];
    const double y = 0.299 * R + 0.587 * G + 0.114 * B;
    out.y.data[i] = detail::clamp01(y);
    out.cb.data[i] = detail::clamp01(0.5 + (B - y) / 1.772);
    out.cr.data[i] = detail::clamp01(0.5 + (R - y) / 1.402);
  }
  return out;
}

inline ColorStack decompose_color_spaces(const RgbImage& rgb, std::string source_id = {}) {
  auto hsv = rgb_to_hsv(rgb.r, rgb.g, rgb.b);
  auto ycc = rgb_to_ycbcr(rgb.r, rgb.g, rgb.b);
  ColorStack cs;
  cs.channels = {std::move(hsv.h), std::move(hsv.s), std::move(hsv.v),
                 std::move(ycc.y), std::move(ycc.cb), std::move(ycc.cr)};
  cs.source_id = std::move(source_id);
  return cs;
}

}  // namespace smad
