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

// LBP, HoG and BSIF descriptors over the scale-space sub-images.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "smad/bsif_bank.hpp"
#include "smad/error.hpp"
#include "smad/imaging.hpp"
#include "smad/scalespace.hpp"

namespace smad {

enum class FeatureType { Lbp = 0, Hog = 1, Bsif = 2 };
inline constexpr int kNumFeatureTypes = 3;
inline constexpr std::array<FeatureType, 3> kFeatureTypes{FeatureType::Lbp, FeatureType::Hog, FeatureType::Bsif};

inline std::string_view to_string(FeatureType f) {
  switch (f) {
    case FeatureType::Lbp: return "lbp";
    case FeatureType::Hog: return "hog";
    case FeatureType::Bsif: return "bsif";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LBP

/// Neighbour offsets for the 8-bit code; bit 0 is east, then counter-clockwise
/// (image rows grow downward, so "north" is y - r).
inline std::array<std::array<int, 2>, 8> lbp_offsets(int radius) {
  const int r = radius;
  return {{{r, 0}, {r, -r}, {0, -r}, {-r, -r}, {-r, 0}, {-r, r}, {0, r}, {r, r}}};
}

/// 256-bin L1-normalized histogram of 8-neighbour LBP codes over interior pixels.
/// A neighbour >= centre sets its bit.
inline std::vector<double> lbp_histogram(const ImagePlane& plane, int radius = 1) {
  require(radius >= 1, Errc::invalid, "lbp_histogram: radius must be >= 1");
  const int side = 2 * radius + 1;
  if (plane.width < side || plane.height < side)
    fail(Errc::invalid, "lbp_histogram: plane smaller than " + std::to_string(side) + "x" + std::to_string(side));
  const auto off = lbp_offsets(radius);
  std::vector<std::uint64_t> counts(256, 0);
  for (int y = radius; y < plane.height - radius; ++y) {
    for (int x = radius; x < plane.width - radius; ++x) {
      const double c = plane.at(x, y);
      unsigned code = 0;
      for (int b = 0; b < 8; ++b)
        if (plane.at(x + off[b][0], y + off[b][1]) >= c) code |= 1u << b;
      ++counts[code];
    }
  }
  const double total = double(plane.width - 2 * radius) * double(plane.height - 2 * radius);
  std::vector<double> hist(256);
  for (int i = 0; i < 256; ++i) hist[i] = double(counts[i]) / total;
  return hist;
}

// ---------------------------------------------------------------------------
// HoG

struct HogParams {
  int cell = 8;
  int bins = 9;
  double clip = 0.2;
  double eps = 1e-6;
};

struct HogLayout {
  int cells_x = 0, cells_y = 0;
  int blocks_x = 0, blocks_y = 0;
  std::size_t dims = 0;
};

inline HogLayout hog_layout(Dims d, const HogParams& p = {}) {
  HogLayout l;
  l.cells_x = d.width / p.cell;
  l.cells_y = d.height / p.cell;
  l.blocks_x = std::max(0, l.cells_x - 1);
  l.blocks_y = std::max(0, l.cells_y - 1);
  l.dims = std::size_t(l.blocks_x) * l.blocks_y * 4 * p.bins;
  return l;
}

/// Unsigned-orientation bin of a gradient; bins split [0,180) evenly.
inline int hog_bin(double gx, double gy, int bins) {
  double deg = std::atan2(gy, gx) * (180.0 / 3.14159265358979323846);
  if (deg < 0.0) deg += 180.0;
  if (deg >= 180.0) deg -= 180.0;
  int b = int(deg / (180.0 / bins));
  return b >= bins ? bins - 1 : b;
}

namespace detail {

/// L2-hys on one block in place: L2 normalize, clip, renormalize.
inline void l2_hys(double* v, int n, double clip, double eps) {
  auto normalize = [&] {
    double ss = 0.0;
    for (int i = 0; i < n; ++i) ss += v[i] * v[i];
    const double inv = 1.0 / std::sqrt(ss + eps * eps);
    for (int i = 0; i < n; ++i) v[i] *= inv;
  };
  normalize();
  for (int i = 0; i < n; ++i) v[i] = std::min(v[i], clip);
  normalize();
}

}  // namespace detail

/// Dalal-Triggs style HoG: central-difference gradients (reflect-101 at the border),
/// magnitude-weighted hard votes into unsigned orientation bins per cell, 2x2-cell
/// blocks at one-cell stride, L2-hys block normalization. Blocks are emitted
/// row-major, cells within a block row-major.
inline std::vector<double> hog_descriptor(const ImagePlane& plane, const HogParams& p = {}) {
  const auto lay = hog_layout(plane.dims(), p);
  if (lay.cells_x < 2 || lay.cells_y < 2)
    fail(Errc::invalid, "hog_descriptor: plane " + std::to_string(plane.width) + "x" + std::to_string(plane.height) +
                            " holds fewer than 2x2 cells of " + std::to_string(p.cell) + " px");
  std::vector<double> cells(std::size_t(lay.cells_x) * lay.cells_y * p.bins, 0.0);
  const int used_w = lay.cells_x * p.cell, used_h = lay.cells_y * p.cell;
  for (int y = 0; y < used_h; ++y) {
    const double* up = plane.row(reflect101(y - 1, plane.height));
    const double* dn = plane.row(reflect101(y + 1, plane.height));
    const double* mid = plane.row(y);
    double* cell_row = cells.data() + std::size_t(y / p.cell) * lay.cells_x * p.bins;
    for (int x = 0; x < used_w; ++x) {
      const double gx = mid[reflect101(x + 1, plane.width)] - mid[reflect101(x - 1, plane.width)];
      const double gy = dn[x] - up[x];
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;
      cell_row[std::size_t(x / p.cell) * p.bins + hog_bin(gx, gy, p.bins)] += mag;
    }
  }
  std::vector<double> out(lay.dims);
  const int block_len = 4 * p.bins;
  double* dst = out.data();
  for (int by = 0; by < lay.blocks_y; ++by) {
    for (int bx = 0; bx < lay.blocks_x; ++bx) {
      for (int cy = 0; cy < 2; ++cy)
        for (int cx = 0; cx < 2; ++cx) {
          const double* src = cells.data() + (std::size_t(by + cy) * lay.cells_x + (bx + cx)) * p.bins;
          std::copy(src, src + p.bins, dst + (cy * 2 + cx) * p.bins);
        }
      detail::l2_hys(dst, block_len, p.clip, p.eps);
      dst += block_len;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// BSIF

/// Filter responses use reflect-101 borders and are taken against the centre pixel,
/// sum_q f(q) * (I(p+q) - I(p)); for zero-mean filters this equals the plain
/// correlation but is exactly zero on flat regions. Bit b is set when filter b
/// responds positively. Returns a 2^count-bin L1-normalized histogram.
inline std::vector<double> bsif_histogram(const ImagePlane& plane, const FilterBank& bank) {
  require(bank.count >= 1 && bank.count <= 16 && bank.size >= 1 && (bank.size & 1) == 1, Errc::invalid,
          "bsif_histogram: filter bank must hold 1..16 odd-sized filters");
  require(bank.taps.size() == std::size_t(bank.count) * bank.size * bank.size, Errc::invalid,
          "bsif_histogram: filter bank tap count mismatch");
  require(plane.width >= 2 && plane.height >= 2, Errc::invalid, "bsif_histogram: plane must be at least 2x2");
  const int half = bank.size / 2;
  const int pw = plane.width + 2 * half;
  const int ph = plane.height + 2 * half;
  std::vector<double> padded(std::size_t(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    const double* src = plane.row(reflect101(y - half, plane.height));
    for (int x = 0; x < pw; ++x) padded[std::size_t(y) * pw + x] = src[reflect101(x - half, plane.width)];
  }

  const int w = plane.width;
  std::vector<double> acc(std::size_t(bank.count) * w);
  std::vector<double> diff(w);
  std::vector<std::uint64_t> counts(std::size_t(1) << bank.count, 0);
  for (int y = 0; y < plane.height; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const double* centre = plane.row(y);
    for (int r = 0; r < bank.size; ++r) {
      const double* src_row = padded.data() + std::size_t(y + r) * pw;
      for (int c = 0; c < bank.size; ++c) {
        const double* src = src_row + c;
        for (int x = 0; x < w; ++x) diff[x] = src[x] - centre[x];
        for (int b = 0; b < bank.count; ++b) {
          const double f = bank.tap(b, r, c);
          double* a = acc.data() + std::size_t(b) * w;
          for (int x = 0; x < w; ++x) a[x] += f * diff[x];
        }
      }
    }
    for (int x = 0; x < w; ++x) {
      unsigned code = 0;
      for (int b = 0; b < bank.count; ++b)
        if (acc[std::size_t(b) * w + x] > 0.0) code |= 1u << b;
      ++counts[code];
    }
  }
  const double total = double(plane.width) * double(plane.height);
  std::vector<double> hist(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) hist[i] = double(counts[i]) / total;
  return hist;
}

}  // namespace smad
