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

// BSIF filter banks: container, validation, file format and the ICA learner
// used to produce the pinned default bank.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smad/binary_io.hpp"
#include "smad/error.hpp"
#include "smad/imaging.hpp"
#include "smad/scalespace.hpp"

namespace smad {

inline constexpr char kFilterBankMagic[8] = {'B', 'S', 'I', 'F', 'B', 'A', 'N', 'K'};
inline constexpr std::uint32_t kFilterBankVersion = 1;

/// `count` square filters of side `size`, stored filter-major then row-major.
struct FilterBank {
  int count = 0;
  int size = 0;
  std::vector<double> taps;

  const double* filter(int b) const { return taps.data() + std::size_t(b) * size * size; }
  double tap(int b, int r, int c) const { return filter(b)[r * size + c]; }

  std::uint64_t checksum() const {
    Fnv1a64 h;
    h.update(&count, sizeof count);
    h.update(&size, sizeof size);
    h.update(taps.data(), taps.size() * sizeof(double));
    return h.digest();
  }

  /// Throws unless the bank has the expected shape, zero-mean filters and orthonormal rows.
  void validate(int expected_count, int expected_size, double tol = 1e-9) const {
    if (count != expected_count || size != expected_size)
      fail(Errc::invalid, "filter bank has " + std::to_string(count) + " filters of " + std::to_string(size) +
                              "x" + std::to_string(size) + ", expected " + std::to_string(expected_count) +
                              " of " + std::to_string(expected_size) + "x" + std::to_string(expected_size));
    if (taps.size() != std::size_t(count) * size * size) fail(Errc::invalid, "filter bank tap count mismatch");
    const int n = size * size;
    for (int b = 0; b < count; ++b) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!std::isfinite(filter(b)[i])) fail(Errc::invalid, "filter bank contains non-finite taps");
        sum += filter(b)[i];
      }
      if (std::abs(sum) > tol) fail(Errc::invalid, "filter " + std::to_string(b) + " is not zero-mean");
      for (int c = 0; c <= b; ++c) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += filter(b)[i] * filter(c)[i];
        if (std::abs(dot - (b == c ? 1.0 : 0.0)) > tol)
          fail(Errc::invalid, "filter bank rows are not orthonormal");
      }
    }
  }

  void save(const std::filesystem::path& path) const {
    BinaryWriter w(path);
    w.put_raw(kFilterBankMagic, sizeof kFilterBankMagic);
    w.put<std::uint32_t>(kFilterBankVersion);
    w.put<std::uint32_t>(std::uint32_t(count));
    w.put<std::uint32_t>(std::uint32_t(size));
    w.put_raw(taps.data(), taps.size() * sizeof(double));
    w.commit();
  }

  static FilterBank load(const std::filesystem::path& path) {
    BinaryReader r(path, "filter bank");
    char magic[8];
    r.get_raw(magic, sizeof magic);
    if (std::memcmp(magic, kFilterBankMagic, sizeof magic) != 0)
      fail(Errc::format, "not a filter bank file: " + path.string());
    if (auto v = r.get<std::uint32_t>(); v != kFilterBankVersion)
      fail(Errc::version, "filter bank version " + std::to_string(v) + " unsupported: " + path.string());
    FilterBank fb;
    fb.count = int(r.get<std::uint32_t>());
    fb.size = int(r.get<std::uint32_t>());
    std::uint64_t n = std::uint64_t(fb.count) * fb.size * fb.size;
    r.check_count(n, sizeof(double));
    fb.taps.resize(n);
    r.get_raw(fb.taps.data(), n * sizeof(double));
    if (!r.at_end()) fail(Errc::format, "trailing bytes in filter bank: " + path.string());
    return fb;
  }
};

struct BsifLearnOptions {
  int size = 11;
  int count = 8;
  int texture_images = 8;
  int texture_side = 256;
  int patches = 40000;
  int max_iterations = 500;
  double tolerance = 1e-10;
  std::uint64_t seed = 20210601;
};

namespace detail {

/// Multi-octave noise with amplitude doubling per octave, giving a roughly 1/f spectrum.
inline ImagePlane pink_noise_texture(int side, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  int octaves = 0;
  while ((side >> octaves) >= 8 && octaves < 6) ++octaves;
  ImagePlane acc(side, side);
  for (int o = 0; o < octaves; ++o) {
    int s = side >> o;
    ImagePlane layer(s, s);
    for (auto& v : layer.data) v = gauss(rng);
    std::vector<Dims> chain;
    for (int t = s; t < side; t *= 2) chain.push_back({t * 2, t * 2});
    for (auto d : chain) layer = expand(layer, d);
    const double amp = double(1 << o);
    for (std::size_t i = 0; i < acc.size(); ++i) acc.data[i] += amp * layer.data[i];
  }
  return acc;
}

}  // namespace detail

/// Learns a BSIF bank: DC-free patches from synthetic 1/f textures, PCA to `count`
/// dimensions, symmetric FastICA (tanh) in the whitened space. The filters are the
/// ICA rotation applied to the PCA basis, so the rows come out orthonormal and zero-mean.
inline FilterBank learn_bsif_bank(const BsifLearnOptions& opt = {}) {
  const int dim = opt.size * opt.size;
  require(opt.count >= 1 && opt.count <= dim, Errc::invalid, "learn_bsif_bank: bad filter count");
  std::mt19937_64 rng(opt.seed);

  std::vector<ImagePlane> textures;
  for (int i = 0; i < opt.texture_images; ++i) textures.push_back(detail::pink_noise_texture(opt.texture_side, rng));

  Eigen::MatrixXd patches(dim, opt.patches);
  std::uniform_int_distribution<int> pick_img(0, opt.texture_images - 1);
  std::uniform_int_distribution<int> pick_pos(0, opt.texture_side - opt.size);
  for (int p = 0; p < opt.patches; ++p) {
    const auto& t = textures[pick_img(rng)];
    int x0 = pick_pos(rng), y0 = pick_pos(rng);
    for (int r = 0; r < opt.size; ++r)
      for (int c = 0; c < opt.size; ++c) patches(r * opt.size + c, p) = t.at(x0 + c, y0 + r);
    patches.col(p).array() -= patches.col(p).mean();
  }

  Eigen::MatrixXd cov = patches * patches.transpose() / double(opt.patches);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigenvalues ascend; take the top `count`.
  Eigen::MatrixXd basis = eig.eigenvectors().rightCols(opt.count).rowwise().reverse();
  Eigen::VectorXd scales = eig.eigenvalues().tail(opt.count).reverse().cwiseSqrt();
  Eigen::MatrixXd z = scales.cwiseInverse().asDiagonal() * basis.transpose() * patches;

  auto sym_decorrelate = [](const Eigen::MatrixXd& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(w * w.transpose());
    Eigen::MatrixXd inv_sqrt = e.eigenvectors() * e.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                               e.eigenvectors().transpose();
    return Eigen::MatrixXd(inv_sqrt * w);
  };

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd w(opt.count, opt.count);
  for (int i = 0; i < w.size(); ++i) w.data()[i] = gauss(rng);
  w = sym_decorrelate(w);
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::MatrixXd u = (w * z).array().tanh();
    Eigen::VectorXd gprime_mean = (1.0 - u.array().square()).rowwise().mean();
    Eigen::MatrixXd w_new = u * z.transpose() / double(opt.patches) - gprime_mean.asDiagonal() * w;
    w_new = sym_decorrelate(w_new);
    double change = ((w_new * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = w_new;
    if (change < opt.tolerance) break;
  }

  Eigen::MatrixXd filters = w * basis.transpose();  // count x dim
  // Remove residual DC and re-orthonormalize (modified Gram-Schmidt, two passes).
  for (int pass = 0; pass < 2; ++pass) {
    for (int b = 0; b < opt.count; ++b) {
      filters.row(b).array() -= filters.row(b).mean();
      for (int c = 0; c < b; ++c) filters.row(b) -= filters.row(b).dot(filters.row(c)) * filters.row(c);
      filters.row(b).normalize();
    }
  }
  // Fixed sign convention: largest-magnitude tap positive.
  for (int b = 0; b < opt.count; ++b) {
    Eigen::Index idx;
    filters.row(b).cwiseAbs().maxCoeff(&idx);
    if (filters(b, idx) < 0) filters.row(b) *= -1.0;
  }

  FilterBank fb;
  fb.count = opt.count;
  fb.size = opt.size;
  fb.taps.resize(std::size_t(opt.count) * dim);
  for (int b = 0; b < opt.count; ++b)
    for (int i = 0; i < dim; ++i) fb.taps[std::size_t(b) * dim + i] = filters(b, i);
  return fb;
}

}  // namespace smad
