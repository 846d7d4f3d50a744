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

// Detector persistence.
//
// Layout (little-endian, trailing FNV-1a 64 checksum over everything before it):
//   "SMADBNDL" u32 version
//   descriptor config, canonical text, hash
//   train config
//   3 feature spaces (standardization + standardized rows + labels)
//   9 models (kind, feature, metadata, state)
//   fusion (normalization, weights, threshold, dev EERs)

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "smad/binary_io.hpp"
#include "smad/detector.hpp"
#include "smad/error.hpp"

namespace smad {

inline constexpr char kBundleMagic[8] = {'S', 'M', 'A', 'D', 'B', 'N', 'D', 'L'};
inline constexpr std::uint32_t kBundleVersion = 1;

namespace detail {

inline void put_vector(BinaryWriter& w, const Eigen::VectorXd& v) { w.put_doubles({v.data(), std::size_t(v.size())}); }
inline Eigen::VectorXd get_vector(BinaryReader& r) {
  auto d = r.get_doubles();
  return Eigen::Map<Eigen::VectorXd>(d.data(), Eigen::Index(d.size()));
}

template <typename M>
void put_matrix(BinaryWriter& w, const M& m) {
  w.put<std::uint64_t>(std::uint64_t(m.rows()));
  w.put<std::uint64_t>(std::uint64_t(m.cols()));
  w.put_raw(m.data(), std::size_t(m.size()) * sizeof(double));
}
template <typename M>
M get_matrix(BinaryReader& r) {
  auto rows = r.get<std::uint64_t>(), cols = r.get<std::uint64_t>();
  if (cols != 0) r.check_count(rows, cols * sizeof(double));
  M m;
  m.resize(Eigen::Index(rows), Eigen::Index(cols));
  r.get_raw(m.data(), std::size_t(rows * cols) * sizeof(double));
  return m;
}

template <typename E>
E get_enum(BinaryReader& r, int count, const char* what) {
  auto v = r.get<std::uint8_t>();
  if (v >= count) fail(Errc::format, r.what() + ": invalid " + what + " code " + std::to_string(v));
  return E(v);
}

inline void put_descriptor(BinaryWriter& w, const DescriptorConfig& d) {
  w.put<std::int32_t>(d.working_size);
  w.put<double>(d.crop_fraction);
  w.put<std::int32_t>(d.pyramid_levels);
  w.put<std::int32_t>(d.lbp_radius);
  w.put<std::int32_t>(d.hog_cell);
  w.put<std::int32_t>(d.hog_bins);
  w.put<double>(d.hog_clip);
  w.put<std::int32_t>(d.bsif_size);
  w.put<std::int32_t>(d.bsif_bits);
  w.put_string(d.bsif_bank);
}
inline DescriptorConfig get_descriptor(BinaryReader& r) {
  DescriptorConfig d;
  d.working_size = r.get<std::int32_t>();
  d.crop_fraction = r.get<double>();
  d.pyramid_levels = r.get<std::int32_t>();
  d.lbp_radius = r.get<std::int32_t>();
  d.hog_cell = r.get<std::int32_t>();
  d.hog_bins = r.get<std::int32_t>();
  d.hog_clip = r.get<double>();
  d.bsif_size = r.get<std::int32_t>();
  d.bsif_bits = r.get<std::int32_t>();
  d.bsif_bank = r.get_string();
  return d;
}

inline void put_train(BinaryWriter& w, const TrainConfig& t) {
  w.put<double>(t.svm.c);
  w.put<double>(t.svm.gap_tolerance);
  w.put<std::int64_t>(t.svm.max_iterations);
  w.put<double>(t.srkda.delta);
  w.put<double>(t.srkda.sigma);
  w.put<double>(t.pcrc.lambda);
  w.put<std::int32_t>(t.replicates);
  w.put<std::uint8_t>(t.resample);
  w.put<std::uint8_t>(std::uint8_t(t.rule));
  w.put<double>(t.dev_fraction);
  w.put<std::uint64_t>(t.seed);
}
inline TrainConfig get_train(BinaryReader& r) {
  TrainConfig t;
  t.svm.c = r.get<double>();
  t.svm.gap_tolerance = r.get<double>();
  t.svm.max_iterations = long(r.get<std::int64_t>());
  t.srkda.delta = r.get<double>();
  t.srkda.sigma = r.get<double>();
  t.pcrc.lambda = r.get<double>();
  t.replicates = r.get<std::int32_t>();
  t.resample = r.get<std::uint8_t>() != 0;
  t.rule = get_enum<WeightRule>(r, 2, "weight rule");
  t.dev_fraction = r.get<double>();
  t.seed = r.get<std::uint64_t>();
  return t;
}

}  // namespace detail

inline void save_bundle(const Detector& det, const std::filesystem::path& path) {
  require(det.models.complete(), Errc::invalid, "save_bundle: detector is missing models");
  BinaryWriter w(path);
  w.put_raw(kBundleMagic, sizeof kBundleMagic);
  w.put<std::uint32_t>(kBundleVersion);
  detail::put_descriptor(w, det.descriptor);
  w.put_string(det.descriptor_canonical);
  w.put<std::uint64_t>(det.descriptor_hash);
  detail::put_train(w, det.train);
  w.put<std::uint64_t>(det.n_fit);
  w.put<std::uint64_t>(det.n_dev);
  w.put_string(det.train_selector);

  for (auto f : kFeatureTypes) {
    const auto& sp = *det.models(f, ClassifierKind::Svm)->space;
    for (auto c : kClassifierKinds)
      require(det.models(f, c)->space.get() == &sp, Errc::invalid, "save_bundle: models of one feature must share a space");
    w.put<std::uint8_t>(std::uint8_t(f));
    detail::put_vector(w, sp.standardization.mean);
    detail::put_vector(w, sp.standardization.scale);
    w.put<std::uint64_t>(sp.standardization.active.size());
    w.put_raw(sp.standardization.active.data(), sp.standardization.active.size());
    detail::put_matrix(w, sp.rows);
    w.put<std::uint64_t>(sp.labels.size());
    for (auto l : sp.labels) w.put<std::uint8_t>(std::uint8_t(l));
  }

  for (auto f : kFeatureTypes)
    for (auto c : kClassifierKinds) {
      const auto& m = *det.models(f, c);
      w.put<std::uint8_t>(std::uint8_t(m.kind));
      w.put<std::uint8_t>(std::uint8_t(m.feature));
      w.put<std::uint64_t>(m.meta.seed);
      w.put_string(m.meta.descriptor);
      w.put<std::uint64_t>(m.meta.hyperparameters.size());
      for (const auto& [k, v] : m.meta.hyperparameters) {
        w.put_string(k);
        w.put<double>(v);
      }
      if (const auto* s = std::get_if<SvmState>(&m.state)) {
        detail::put_vector(w, s->w);
        w.put<double>(s->b);
        detail::put_vector(w, s->alpha);
        w.put<double>(s->duality_gap);
        w.put<double>(s->max_violation);
        w.put<std::int64_t>(s->iterations);
      } else if (const auto* s = std::get_if<SrkdaState>(&m.state)) {
        detail::put_vector(w, s->alpha);
        w.put<double>(s->sigma);
        w.put<double>(s->delta);
        w.put<double>(s->mean_bona);
        w.put<double>(s->mean_morph);
      } else {
        const auto& p = std::get<PcrcState>(m.state);
        detail::put_matrix(w, p.chol_lower);
        w.put<double>(p.lambda);
      }
    }

  const auto& fu = det.fusion;
  for (int k = 0; k < kNumStreams; ++k) {
    w.put<double>(fu.normalization.min[std::size_t(k)]);
    w.put<double>(fu.normalization.max[std::size_t(k)]);
    w.put<std::uint8_t>(fu.normalization.degenerate[std::size_t(k)]);
  }
  for (const auto& t : fu.weights.level1)
    for (double v : t) w.put<double>(v);
  for (double v : fu.weights.level2) w.put<double>(v);
  w.put<double>(fu.threshold);
  for (const auto& t : det.level1_eers)
    for (double v : t) w.put<double>(v);
  for (double v : det.level2_eers) w.put<double>(v);
  w.commit();
}

/// Reads a bundle, verifying magic, version and checksum.
inline Detector load_bundle(const std::filesystem::path& path) {
  BinaryReader r(path, "model bundle");
  char magic[8];
  r.get_raw(magic, sizeof magic);
  if (!std::equal(magic, magic + 8, kBundleMagic)) fail(Errc::format, "not a model bundle: " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kBundleVersion)
    fail(Errc::version, "model bundle version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kBundleVersion) + "): " + path.string());
  Detector det;
  det.descriptor = detail::get_descriptor(r);
  det.descriptor_canonical = r.get_string();
  det.descriptor_hash = r.get<std::uint64_t>();
  det.train = detail::get_train(r);
  det.n_fit = r.get<std::uint64_t>();
  det.n_dev = r.get<std::uint64_t>();
  det.train_selector = r.get_string();

  std::array<std::shared_ptr<FeatureSpace>, kNumFeatureTypes> spaces;
  for (auto f : kFeatureTypes) {
    auto sp = std::make_shared<FeatureSpace>();
    sp->type = detail::get_enum<FeatureType>(r, kNumFeatureTypes, "feature type");
    if (sp->type != f) fail(Errc::format, "model bundle: feature spaces out of order");
    sp->standardization.mean = detail::get_vector(r);
    sp->standardization.scale = detail::get_vector(r);
    auto na = r.get<std::uint64_t>();
    r.check_count(na, 1);
    sp->standardization.active.resize(na);
    r.get_raw(sp->standardization.active.data(), na);
    sp->rows = detail::get_matrix<RowMatrix>(r);
    auto nl = r.get<std::uint64_t>();
    r.check_count(nl, 1);
    for (std::uint64_t i = 0; i < nl; ++i) sp->labels.push_back(detail::get_enum<Label>(r, 2, "label"));
    const auto d = sp->standardization.mean.size();
    if (sp->standardization.scale.size() != d || Eigen::Index(na) != d || sp->rows.cols() != d ||
        Eigen::Index(nl) != sp->rows.rows())
      fail(Errc::format, "model bundle: inconsistent feature space dimensions");
    spaces[std::size_t(f)] = std::move(sp);
  }

  for (auto f : kFeatureTypes)
    for (auto c : kClassifierKinds) {
      TrainedModel m;
      m.kind = detail::get_enum<ClassifierKind>(r, kNumClassifiers, "classifier kind");
      m.feature = detail::get_enum<FeatureType>(r, kNumFeatureTypes, "feature type");
      if (m.kind != c || m.feature != f) fail(Errc::format, "model bundle: models out of order");
      m.space = spaces[std::size_t(f)];
      m.meta.seed = r.get<std::uint64_t>();
      m.meta.descriptor = r.get_string();
      auto nh = r.get<std::uint64_t>();
      r.check_count(nh, 16);
      for (std::uint64_t i = 0; i < nh; ++i) {
        auto k = r.get_string();
        m.meta.hyperparameters[k] = r.get<double>();
      }
      const auto n = m.space->size(), d = m.space->rows.cols();
      bool ok = true;
      if (c == ClassifierKind::Svm) {
        SvmState s;
        s.w = detail::get_vector(r);
        s.b = r.get<double>();
        s.alpha = detail::get_vector(r);
        s.duality_gap = r.get<double>();
        s.max_violation = r.get<double>();
        s.iterations = long(r.get<std::int64_t>());
        ok = s.w.size() == d && s.alpha.size() == n;
        m.state = std::move(s);
      } else if (c == ClassifierKind::Srkda) {
        SrkdaState s;
        s.alpha = detail::get_vector(r);
        s.sigma = r.get<double>();
        s.delta = r.get<double>();
        s.mean_bona = r.get<double>();
        s.mean_morph = r.get<double>();
        ok = s.alpha.size() == n;
        m.state = std::move(s);
      } else {
        PcrcState s;
        s.chol_lower = detail::get_matrix<Eigen::MatrixXd>(r);
        s.lambda = r.get<double>();
        ok = s.chol_lower.rows() == n && s.chol_lower.cols() == n;
        m.state = std::move(s);
      }
      if (!ok) fail(Errc::format, "model bundle: inconsistent model dimensions");
      det.models(f, c) = std::move(m);
    }

  auto& fu = det.fusion;
  for (int k = 0; k < kNumStreams; ++k) {
    fu.normalization.min[std::size_t(k)] = r.get<double>();
    fu.normalization.max[std::size_t(k)] = r.get<double>();
    fu.normalization.degenerate[std::size_t(k)] = r.get<std::uint8_t>() != 0;
  }
  for (auto& t : fu.weights.level1)
    for (double& v : t) v = r.get<double>();
  for (double& v : fu.weights.level2) v = r.get<double>();
  fu.threshold = r.get<double>();
  for (auto& t : det.level1_eers)
    for (double& v : t) v = r.get<double>();
  for (double& v : det.level2_eers) v = r.get<double>();
  if (!r.at_end()) fail(Errc::format, "model bundle: trailing data in " + path.string());
  return det;
}

/// Refuses to pair a bundle with an extractor whose descriptor differs from the one it was trained with.
inline void check_descriptor(const Detector& det, const FeatureExtractor& ex) {
  if (det.descriptor_canonical != ex.canonical())
    fail(Errc::mismatch, "model bundle was trained with descriptor '" + det.descriptor_canonical +
                             "' but the current descriptor is '" + ex.canonical() + "'");
}

/// Loads a bundle and rebuilds the feature extractor it was trained with.
inline std::pair<Detector, FeatureExtractor> load_bundle_with_extractor(const std::filesystem::path& path) {
  auto det = load_bundle(path);
  FeatureExtractor ex(det.descriptor);
  check_descriptor(det, ex);
  return {std::move(det), std::move(ex)};
}

}  // namespace smad
