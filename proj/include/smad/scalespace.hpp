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

// Burt-Adelson Laplacian pyramid over each colour channel.
//
// Kernel: binomial [1 4 6 4 1]/16 applied separably, reflect-101 borders.
// Sub-image k (0-based) maps to channel k / levels and pyramid level k % levels.

#include <array>
#include <string>
#include <vector>

#include "smad/error.hpp"
#include "smad/imaging.hpp"

namespace smad {

inline constexpr std::array<double, 5> kBinomial5{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

/// Reflect-101 index folding (…2 1 | 0 1 2 … n-1 | n-2 …); n must be >= 2.
inline int reflect101(int i, int n) {
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Blur with the binomial kernel and keep every second sample; output is ceil(dims/2).
inline ImagePlane gaussian_reduce(const ImagePlane& in) {
  if (in.width < 2 || in.height < 2)
    fail(Errc::invalid, "gaussian_reduce: plane must be at least 2x2, got " + std::to_string(in.width) + "x" +
                            std::to_string(in.height));
  const int ow = (in.width + 1) / 2, oh = (in.height + 1) / 2;
  ImagePlane horiz(ow, in.height);
  for (int y = 0; y < in.height; ++y) {
    const double* src = in.row(y);
    double* dst = horiz.row(y);
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = -2; t <= 2; ++t) acc += kBinomial5[t + 2] * src[reflect101(2 * x + t, in.width)];
      dst[x] = acc;
    }
  }
  ImagePlane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    double* dst = out.row(y);
    for (int t = -2; t <= 2; ++t) {
      const double* src = horiz.row(reflect101(2 * y + t, in.height));
      const double w = kBinomial5[t + 2];
      for (int x = 0; x < ow; ++x) dst[x] += w * src[x];
    }
  }
  return out;
}

/// Zero-interleaved upsampling to `target` followed by the binomial kernel with gain 2 per axis.
inline ImagePlane expand(const ImagePlane& in, Dims target) {
  auto compatible = [](int src, int dst) { return dst == 2 * src || dst == 2 * src - 1; };
  if (in.width < 1 || in.height < 1 || !compatible(in.width, target.width) || !compatible(in.height, target.height))
    fail(Errc::invalid, "expand: target " + std::to_string(target.width) + "x" + std::to_string(target.height) +
                            " incompatible with " + std::to_string(in.width) + "x" + std::to_string(in.height));
  if (target.width < 2 || target.height < 2) fail(Errc::invalid, "expand: target must be at least 2x2");

  // Only even positions of the interleaved signal are non-zero, so each output
  // sample gathers the taps that land on even reflected indices.
  auto gather = [](int pos, int n, auto&& fetch) {
    double acc = 0.0;
    for (int t = -2; t <= 2; ++t) {
      int q = reflect101(pos + t, n);
      if ((q & 1) == 0) acc += kBinomial5[t + 2] * fetch(q / 2);
    }
    return 2.0 * acc;
  };

  ImagePlane horiz(target.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    const double* src = in.row(y);
    double* dst = horiz.row(y);
    for (int x = 0; x < target.width; ++x) dst[x] = gather(x, target.width, [&](int i) { return src[i]; });
  }
  ImagePlane out(target);
  for (int y = 0; y < target.height; ++y) {
    double* dst = out.row(y);
    for (int t = -2; t <= 2; ++t) {
      int q = reflect101(y + t, target.height);
      if (q & 1) continue;
      const double w = 2.0 * kBinomial5[t + 2];
      const double* src = horiz.row(q / 2);
      for (int x = 0; x < target.width; ++x) dst[x] += w * src[x];
    }
  }
  return out;
}

struct LaplacianPyramid {
  std::vector<ImagePlane> bands;  // band-pass levels, finest first
  ImagePlane residue;             // low-pass remainder below the deepest band
};

inline LaplacianPyramid laplacian_pyramid(const ImagePlane& plane, int levels = 3) {
  require(levels >= 1, Errc::invalid, "laplacian_pyramid: levels must be >= 1");
  const int min_side = 1 << levels;
  if (plane.width < min_side || plane.height < min_side)
    fail(Errc::invalid, "laplacian_pyramid: " + std::to_string(levels) + " levels need at least " +
                            std::to_string(min_side) + "x" + std::to_string(min_side) + " input, got " +
                            std::to_string(plane.width) + "x" + std::to_string(plane.height));
  LaplacianPyramid pyr;
  pyr.bands.reserve(levels);
  ImagePlane current = plane;
  for (int i = 0; i < levels; ++i) {
    ImagePlane next = gaussian_reduce(current);
    ImagePlane up = expand(next, current.dims());
    for (std::size_t j = 0; j < current.size(); ++j) current.data[j] -= up.data[j];
    pyr.bands.push_back(std::move(current));
    current = std::move(next);
  }
  pyr.residue = std::move(current);
  return pyr;
}

/// Inverse of laplacian_pyramid.
inline ImagePlane collapse(const LaplacianPyramid& pyr) {
  require(!pyr.bands.empty(), Errc::invalid, "collapse: empty pyramid");
  ImagePlane current = pyr.residue;
  for (auto it = pyr.bands.rbegin(); it != pyr.bands.rend(); ++it) {
    ImagePlane up = expand(current, it->dims());
    for (std::size_t j = 0; j < up.size(); ++j) up.data[j] += it->data[j];
    current = std::move(up);
  }
  return current;
}

/// The per-image band-pass sub-images, channel-major (H1,H2,H3,S1,…,Cr3 for three levels).
struct ScaleSpaceStack {
  std::vector<ImagePlane> sub_images;
  int levels = 3;
  std::string source_id;

  static int index_of(Channel c, int level, int levels) { return static_cast<int>(c) * levels + level; }
  Channel channel_of(int k) const { return static_cast<Channel>(k / levels); }
  int level_of(int k) const { return k % levels; }
  std::string label(int k) const {
    return std::string(kChannelNames[k / levels]) + std::to_string(k % levels + 1);
  }
};

inline ScaleSpaceStack build_scale_space_stack(const ColorStack& cs, int levels = 3) {
  ScaleSpaceStack st;
  st.levels = levels;
  st.source_id = cs.source_id;
  st.sub_images.reserve(std::size_t(kNumChannels) * levels);
  const Dims d = cs.channels[0].dims();
  for (const auto& ch : cs.channels) {
    require(ch.dims() == d, Errc::invalid, "build_scale_space_stack: channels differ in size");
    auto pyr = laplacian_pyramid(ch, levels);
    for (auto& band : pyr.bands) st.sub_images.push_back(std::move(band));
  }
  return st;
}

}  // namespace smad
