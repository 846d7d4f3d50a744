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

// Procedural face-like dataset with controllable morphing artefacts.
//
// Every subject is a vector of standard-normal deviates (geometry and appearance)
// plus a smooth texture field. A morph blends two subjects as (zA + zB) / sqrt(2),
// which keeps the population distribution of bona fide faces, and then adds
// double-edge ghosting around the eyes and nose: the face is mixed with a copy of
// itself displaced by a few pixels. With ghost_amplitude = 0 morphs and bona fide
// images are statistically identical.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "smad/error.hpp"
#include "smad/imaging.hpp"
#include "smad/manifest.hpp"

namespace smad {

struct SynthOptions {
  int n_per_class = 100;  // per (medium, post, compression) variant
  std::uint64_t seed = 7;
  int size = 320;
  double ghost_amplitude = 0.5;
  double post_attenuation = 0.35;  // ghost amplitude multiplier for post-processed morphs
  double capture_noise = 0.01;
  int jpeg_quality = 75;
  std::vector<Medium> media{Medium::Digital};
  std::vector<Post> posts{Post::Before};
  std::vector<bool> compression{false};

  void validate() const {
    require(n_per_class >= 2, Errc::config, "synth: n_per_class must be >= 2");
    require(size >= 64, Errc::config, "synth: size must be >= 64");
    require(ghost_amplitude >= 0.0 && ghost_amplitude <= 1.0, Errc::config, "synth: ghost_amplitude must be in [0,1]");
    require(post_attenuation >= 0.0 && post_attenuation <= 1.0, Errc::config,
            "synth: post_attenuation must be in [0,1]");
    require(capture_noise >= 0.0, Errc::config, "synth: capture_noise must be >= 0");
    require(jpeg_quality >= 1 && jpeg_quality <= 100, Errc::config, "synth: jpeg_quality must be in [1,100]");
    require(!media.empty() && !posts.empty() && !compression.empty(), Errc::config, "synth: empty variant list");
  }
};

namespace synth {

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix(mix(mix(mix(seed) ^ a) ^ b) ^ c);
}

inline constexpr int kIdentityDims = 25;
inline constexpr int kGridA = 12, kGridB = 24, kGridC = 96;

struct Identity {
  std::array<double, kIdentityDims> z{};
  std::vector<double> grid_a, grid_b, grid_c;  // texture lattices (coarse to fine), standard normal
};

inline Identity random_identity(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Identity id;
  for (auto& v : id.z) v = n01(rng);
  id.grid_a.resize(kGridA * kGridA);
  id.grid_b.resize(kGridB * kGridB);
  id.grid_c.resize(kGridC * kGridC);
  for (auto& v : id.grid_a) v = n01(rng);
  for (auto& v : id.grid_b) v = n01(rng);
  for (auto& v : id.grid_c) v = n01(rng);
  return id;
}

/// Variance-preserving blend of two identities.
inline Identity blend(const Identity& a, const Identity& b) {
  const double k = 1.0 / std::sqrt(2.0);
  Identity m;
  for (int i = 0; i < kIdentityDims; ++i) m.z[std::size_t(i)] = k * (a.z[std::size_t(i)] + b.z[std::size_t(i)]);
  m.grid_a.resize(a.grid_a.size());
  m.grid_b.resize(a.grid_b.size());
  for (std::size_t i = 0; i < m.grid_a.size(); ++i) m.grid_a[i] = k * (a.grid_a[i] + b.grid_a[i]);
  for (std::size_t i = 0; i < m.grid_b.size(); ++i) m.grid_b[i] = k * (a.grid_b[i] + b.grid_b[i]);
  m.grid_c.resize(a.grid_c.size());
  for (std::size_t i = 0; i < m.grid_c.size(); ++i) m.grid_c[i] = k * (a.grid_c[i] + b.grid_c[i]);
  return m;
}

struct Capture {
  double dx = 0, dy = 0, gain = 1.0;
  std::array<double, 3> background{};
};

inline Capture random_capture(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Capture c;
  c.dx = 0.006 * n01(rng);
  c.dy = 0.006 * n01(rng);
  c.gain = 1.0 + 0.03 * n01(rng);
  c.background = {0.82 + 0.03 * n01(rng), 0.84 + 0.03 * n01(rng), 0.88 + 0.03 * n01(rng)};
  return c;
}

/// Geometry in units of the image side.
struct Geometry {
  double cx, cy, rx, ry, eye_y, eye_dx, eye_rx, eye_ry, brow_gap, nose_len, mouth_y, mouth_w, hair_top;
  std::array<double, 3> skin, hair, iris, lips;
};

inline Geometry geometry_of(const Identity& id, const Capture& c) {
  const auto& z = id.z;
  Geometry g;
  g.cx = 0.5 + 0.015 * z[0] + c.dx;
  g.cy = 0.54 + 0.015 * z[1] + c.dy;
  g.rx = 0.29 + 0.018 * z[2];
  g.ry = 0.37 + 0.018 * z[3];
  g.eye_y = g.cy - 0.08 + 0.012 * z[4];
  g.eye_dx = 0.12 + 0.009 * z[5];
  g.eye_rx = 0.055 + 0.005 * z[6];
  g.eye_ry = 0.026 + 0.003 * z[7];
  g.brow_gap = 0.05 + 0.006 * z[8];
  g.nose_len = 0.14 + 0.012 * z[9];
  g.mouth_y = g.cy + 0.21 + 0.012 * z[10];
  g.mouth_w = 0.085 + 0.008 * z[11];
  g.hair_top = 0.10 + 0.02 * z[12];
  for (int k = 0; k < 3; ++k) {
    g.skin[std::size_t(k)] = std::array{0.80, 0.62, 0.52}[std::size_t(k)] + 0.05 * z[std::size_t(13 + k)];
    g.hair[std::size_t(k)] = std::array{0.26, 0.19, 0.13}[std::size_t(k)] + 0.05 * z[std::size_t(16 + k)];
    g.iris[std::size_t(k)] = std::array{0.32, 0.26, 0.20}[std::size_t(k)] + 0.07 * z[std::size_t(19 + k)];
    g.lips[std::size_t(k)] = std::array{0.72, 0.42, 0.42}[std::size_t(k)] + 0.04 * z[std::size_t(22 + k)];
  }
  return g;
}

/// Bilinear sample of a periodic-free lattice spanning the unit square.
inline double lattice(const std::vector<double>& grid, int n, double u, double v) {
  double x = std::clamp(u, 0.0, 1.0) * (n - 1), y = std::clamp(v, 0.0, 1.0) * (n - 1);
  int x0 = std::min(int(x), n - 2), y0 = std::min(int(y), n - 2);
  double fx = x - x0, fy = y - y0;
  auto at = [&](int i, int j) { return grid[std::size_t(j * n + i)]; };
  return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x0 + 1, y0)) + fy * ((1 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1));
}

/// Soft ellipse coverage with an edge about 1.5 px wide.
inline double ellipse(double u, double v, double cx, double cy, double rx, double ry, double px) {
  const double e = std::sqrt((u - cx) * (u - cx) / (rx * rx) + (v - cy) * (v - cy) / (ry * ry));
  return std::clamp((1.0 - e) * std::min(rx, ry) / (1.5 * px) + 0.5, 0.0, 1.0);
}

inline RgbImage render(const Identity& id, const Capture& cap, int size) {
  const auto g = geometry_of(id, cap);
  RgbImage img{ImagePlane(size, size), ImagePlane(size, size), ImagePlane(size, size)};
  const double px = 1.0 / size;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double u = (x + 0.5) * px, v = (y + 0.5) * px;
      std::array<double, 3> col;
      for (int k = 0; k < 3; ++k) col[std::size_t(k)] = cap.background[std::size_t(k)] - 0.06 * (v - 0.5);
      auto over = [&](const std::array<double, 3>& c, double a) {
        for (int k = 0; k < 3; ++k) col[std::size_t(k)] += a * (c[std::size_t(k)] - col[std::size_t(k)]);
      };
      auto scaled = [](std::array<double, 3> c, double s) {
        for (auto& t : c) t *= s;
        return c;
      };

      over(g.hair, ellipse(u, v, g.cx, g.cy - 0.05, g.rx * 1.16, g.ry + g.hair_top * 0.5, px));
      const double neck = std::clamp((0.075 - std::abs(u - g.cx)) / (1.5 * px) + 0.5, 0.0, 1.0) *
                          (v > g.cy + g.ry * 0.5 ? 1.0 : 0.0);
      over(scaled(g.skin, 0.82), neck);

      const double face = ellipse(u, v, g.cx, g.cy, g.rx, g.ry, px);
      if (face > 0) {
        const double eu = (u - g.cx) / g.rx, ev = (v - g.cy) / g.ry;
        const double shade = 1.0 - 0.16 * (eu * eu + 0.5 * ev * ev);
        const double tex = 0.035 * lattice(id.grid_a, kGridA, u, v) + 0.02 * lattice(id.grid_b, kGridB, u, v) +
                           0.06 * lattice(id.grid_c, kGridC, u, v);
        std::array<double, 3> skin;
        for (int k = 0; k < 3; ++k) skin[std::size_t(k)] = g.skin[std::size_t(k)] * shade + tex;
        over(skin, face);
      }

      for (double side : {-1.0, 1.0}) {
        const double ex = g.cx + side * g.eye_dx;
        // Brow: a thin ellipse above the eye, cut to its upper half.
        const double brow = ellipse(u, v, ex, g.eye_y - g.brow_gap, g.eye_rx * 1.25, g.eye_ry * 0.55, px);
        over(scaled(g.hair, 0.85), brow);
        const double sclera = ellipse(u, v, ex, g.eye_y, g.eye_rx, g.eye_ry, px);
        over({0.93, 0.92, 0.90}, sclera);
        over(g.iris, sclera * ellipse(u, v, ex, g.eye_y, g.eye_ry * 0.95, g.eye_ry * 0.95, px));
        over({0.04, 0.04, 0.05}, sclera * ellipse(u, v, ex, g.eye_y, g.eye_ry * 0.42, g.eye_ry * 0.42, px));
        // Upper lid line.
        const double lid = ellipse(u, v, ex, g.eye_y - 0.15 * g.eye_ry, g.eye_rx * 1.05, g.eye_ry * 1.05, px) *
                           (1.0 - ellipse(u, v, ex, g.eye_y + 0.1 * g.eye_ry, g.eye_rx * 1.02, g.eye_ry, px)) *
                           (v < g.eye_y ? 1.0 : 0.0);
        over(scaled(g.skin, 0.35), lid);
        // Nose flank shading and nostril.
        const double nx = g.cx + side * 0.028;
        const double top = g.eye_y + 0.03, bottom = g.eye_y + g.nose_len;
        if (v > top && v < bottom) {
          const double flank = std::exp(-((u - nx) * (u - nx)) / (2 * 0.006 * 0.006)) * std::min(1.0, (v - top) / 0.04);
          over(scaled(g.skin, 0.72), 0.6 * flank);
        }
        over(scaled(g.skin, 0.3), ellipse(u, v, g.cx + side * 0.02, bottom, 0.011, 0.006, px));
      }

      over(g.lips, ellipse(u, v, g.cx, g.mouth_y, g.mouth_w, 0.022, px));
      over(scaled(g.lips, 0.45), ellipse(u, v, g.cx, g.mouth_y, g.mouth_w * 0.95, 0.0035, px));

      for (int k = 0; k < 3; ++k) col[std::size_t(k)] *= cap.gain;
      img.r.at(x, y) = col[0];
      img.g.at(x, y) = col[1];
      img.b.at(x, y) = col[2];
    }
  return img;
}

/// Weight of the ghosting: both eyes and brows (full) and the nose and mouth (partial).
inline ImagePlane ghost_window(const Identity& id, const Capture& cap, int size) {
  const auto g = geometry_of(id, cap);
  ImagePlane w(size, size);
  const double se = 2.4 * g.eye_rx, sn = 0.12;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double u = (x + 0.5) / size, v = (y + 0.5) / size;
      double acc = 0;
      for (double side : {-1.0, 1.0}) {
        const double du = u - (g.cx + side * g.eye_dx), dv = v - (g.eye_y - 0.3 * g.brow_gap);
        acc += std::exp(-(du * du + dv * dv) / (2 * se * se));
      }
      const double du = u - g.cx, dv = v - 0.5 * (g.eye_y + g.nose_len + g.mouth_y);
      acc += std::exp(-(du * du + dv * dv) / (2 * sn * sn));
      w.at(x, y) = std::min(1.0, acc);
    }
  return w;
}

inline double sample_clamped(const ImagePlane& p, double x, double y) {
  x = std::clamp(x, 0.0, double(p.width - 1));
  y = std::clamp(y, 0.0, double(p.height - 1));
  int x0 = std::min(int(x), p.width - 2), y0 = std::min(int(y), p.height - 2);
  double fx = x - x0, fy = y - y0;
  return (1 - fy) * ((1 - fx) * p.at(x0, y0) + fx * p.at(x0 + 1, y0)) +
         fy * ((1 - fx) * p.at(x0, y0 + 1) + fx * p.at(x0 + 1, y0 + 1));
}

/// I + a * w * (shift(I, d) - I)
inline void apply_ghosting(RgbImage& img, const ImagePlane& window, double amplitude, double dx, double dy) {
  if (amplitude <= 0) return;
  for (ImagePlane* p : {&img.r, &img.g, &img.b}) {
    const ImagePlane src = *p;
    for (int y = 0; y < src.height; ++y)
      for (int x = 0; x < src.width; ++x) {
        const double s = sample_clamped(src, x - dx, y - dy);
        p->at(x, y) += amplitude * window.at(x, y) * (s - src.at(x, y));
      }
  }
}

inline void add_noise(RgbImage& img, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0) return;
  std::normal_distribution<double> n(0.0, sigma);
  for (ImagePlane* p : {&img.r, &img.g, &img.b})
    for (auto& v : p->data) v += n(rng);
}

inline ImagePlane gaussian_blur(const ImagePlane& in, double sigma) {
  const int r = std::max(1, int(std::ceil(3 * sigma)));
  std::vector<double> k(std::size_t(2 * r + 1));
  double sum = 0;
  for (int i = -r; i <= r; ++i) sum += k[std::size_t(i + r)] = std::exp(-i * i / (2 * sigma * sigma));
  for (auto& v : k) v /= sum;
  auto refl = [](int i, int n) {
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * n - 2 - i;
    return i;
  };
  ImagePlane tmp(in.dims()), out(in.dims());
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) acc += k[std::size_t(i + r)] * in.at(refl(x + i, in.width), y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      double acc = 0;
      for (int i = -r; i <= r; ++i) acc += k[std::size_t(i + r)] * tmp.at(x, refl(y + i, in.height));
      out.at(x, y) = acc;
    }
  return out;
}

struct MediumModel {
  double blur_sigma = 0, noise = 0, gamma = 1;
};

/// Print-scan stand-ins: blur, additive noise and a tone curve.
inline MediumModel medium_model(Medium m) {
  switch (m) {
    case Medium::Digital: return {};
    case Medium::Ps1: return {0.6, 0.01, 1.05};
    case Medium::Ps2: return {1.2, 0.025, 1.15};
  }
  return {};
}

inline void apply_medium(RgbImage& img, Medium m, std::mt19937_64& rng) {
  const auto mm = medium_model(m);
  if (mm.blur_sigma > 0)
    for (ImagePlane* p : {&img.r, &img.g, &img.b}) *p = gaussian_blur(*p, mm.blur_sigma);
  add_noise(img, mm.noise, rng);
  if (mm.gamma != 1.0)
    for (ImagePlane* p : {&img.r, &img.g, &img.b})
      for (auto& v : p->data) v = std::pow(std::clamp(v, 0.0, 1.0), mm.gamma);
}

inline void clamp_image(RgbImage& img) {
  for (ImagePlane* p : {&img.r, &img.g, &img.b})
    for (auto& v : p->data) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace synth

/// Writes images under out_dir/<medium>/<post>/<raw|jpeg>/ and out_dir/manifest.csv.
inline DatasetManifest generate_synthetic_dataset(const std::filesystem::path& out_dir, const SynthOptions& opt = {}) {
  opt.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    fail(Errc::io, "cannot create output directory '" + out_dir.string() + "'" + (ec ? ": " + ec.message() : ""));

  const int n = opt.n_per_class;
  const int n_subjects = std::max(4, 2 * ((n + 5) / 6));  // about three captures per subject
  const int half = n_subjects / 2;  // subjects [0, half) train, [half, n_subjects) test
  auto subject_name = [](int s) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%04d", s + 1);
    return std::string(buf);
  };

  std::vector<synth::Identity> ids;
  for (int s = 0; s < n_subjects; ++s) {
    std::mt19937_64 rng(synth::derive_seed(opt.seed, 1, std::uint64_t(s)));
    ids.push_back(synth::random_identity(rng));
  }

  struct Sample {
    Label label;
    Partition partition;
    int a, b;  // subjects (b == -1 for bona fide)
    std::string name;
  };
  std::vector<Sample> samples;
  for (int i = 0; i < n; ++i) {
    const bool train = i % 2 == 0;
    const int s = (train ? 0 : half) + (i / 2) % (train ? half : n_subjects - half);
    char buf[32];
    std::snprintf(buf, sizeof buf, "bf_%04d", i + 1);
    samples.push_back({Label::BonaFide, train ? Partition::Train : Partition::Test, s, -1, buf});
  }
  for (int i = 0; i < n; ++i) {
    const bool train = i % 2 == 0;
    const int lo = train ? 0 : half, count = train ? half : n_subjects - half;
    std::mt19937_64 rng(synth::derive_seed(opt.seed, 2, std::uint64_t(i)));
    std::uniform_int_distribution<int> pick(0, count - 1);
    const int a = lo + pick(rng);
    int b = lo + pick(rng);
    while (b == a) b = lo + pick(rng);
    char buf[32];
    std::snprintf(buf, sizeof buf, "mo_%04d", i + 1);
    samples.push_back({Label::Morph, train ? Partition::Train : Partition::Test, std::min(a, b), std::max(a, b), buf});
  }

  DatasetManifest m;
  m.base_dir = std::filesystem::absolute(out_dir);
  for (std::size_t si = 0; si < samples.size(); ++si) {
    const auto& smp = samples[si];
    std::mt19937_64 cap_rng(synth::derive_seed(opt.seed, 3, si));
    const auto cap = synth::random_capture(cap_rng);
    const auto id = smp.label == Label::Morph ? synth::blend(ids[std::size_t(smp.a)], ids[std::size_t(smp.b)])
                                              : ids[std::size_t(smp.a)];
    const auto base = synth::render(id, cap, opt.size);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi), mag(4.0, 10.0);
    const double theta = ang(cap_rng), dist = mag(cap_rng) * opt.size / 320.0;
    const double gdx = dist * std::cos(theta), gdy = dist * 0.5 * std::sin(theta);
    const ImagePlane window = smp.label == Label::Morph ? synth::ghost_window(id, cap, opt.size) : ImagePlane{};
    const std::uint64_t capture_noise_seed = cap_rng();

    for (auto post : opt.posts) {
      RgbImage img = base;
      if (smp.label == Label::Morph)
        synth::apply_ghosting(img, window, opt.ghost_amplitude * (post == Post::After ? opt.post_attenuation : 1.0), gdx,
                              gdy);
      std::mt19937_64 noise_rng(capture_noise_seed);
      synth::add_noise(img, opt.capture_noise, noise_rng);
      for (auto medium : opt.media) {
        RgbImage printed = img;
        std::mt19937_64 med_rng(synth::derive_seed(opt.seed, 4, si, std::uint64_t(medium)));
        synth::apply_medium(printed, medium, med_rng);
        synth::clamp_image(printed);
        for (bool comp : opt.compression) {
          const auto rel = std::filesystem::path(std::string(to_string(medium))) / std::string(to_string(post)) /
                           (comp ? "jpeg" : "raw") / (smp.label == Label::Morph ? "morph" : "bonafide") /
                           (smp.name + (comp ? ".jpg" : ".png"));
          std::filesystem::create_directories((out_dir / rel).parent_path(), ec);
          if (ec) fail(Errc::io, "cannot create directory under '" + out_dir.string() + "': " + ec.message());
          save_image(out_dir / rel, printed, opt.jpeg_quality);
          ManifestRow row;
          row.path = rel.generic_string();
          row.label = smp.label;
          row.medium = medium;
          row.post = post;
          row.compressed = comp;
          row.partition = smp.partition;
          row.subject_id = smp.label == Label::Morph ? subject_name(smp.a) + "+" + subject_name(smp.b)
                                                     : subject_name(smp.a);
          m.rows.push_back(std::move(row));
        }
      }
    }
  }
  m.validate();
  write_manifest(out_dir / "manifest.csv", m);
  return m;
}

}  // namespace smad
