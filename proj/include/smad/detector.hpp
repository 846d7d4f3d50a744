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

// Nine models, fusion and an operating threshold, trained from labelled FeatureSets.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "smad/classifiers.hpp"
#include "smad/error.hpp"
#include "smad/features.hpp"
#include "smad/fusion.hpp"
#include "smad/metrics.hpp"

namespace smad {

/// Extracts features for every path on `workers` threads; results are in input order.
inline std::vector<FeatureSet> extract_all(const FeatureExtractor& ex, const std::vector<std::filesystem::path>& paths,
                                           int workers = 1,
                                           const std::function<void(std::size_t done, std::size_t total)>& progress = {}) {
  std::vector<FeatureSet> out(paths.size());
  std::atomic<std::size_t> next{0}, done{0};
  std::exception_ptr first_error;
  std::size_t first_error_index = paths.size();
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < paths.size();) {
      try {
        out[i] = ex.extract_file(paths[i]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < first_error_index) first_error_index = i, first_error = std::current_exception();
      }
      auto d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(mu);
        progress(d, paths.size());
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, int(paths.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

struct TrainConfig {
  SvmParams svm;
  SrkdaParams srkda;
  PcrcParams pcrc;
  int replicates = 100;
  bool resample = true;
  WeightRule rule = WeightRule::OneMinusEer;
  double dev_fraction = 0.2;
  std::uint64_t seed = 42;
};

struct DevSplit {
  std::vector<std::size_t> fit, dev;
};

/// Stratified, seeded split: round(fraction * n_class) samples per class go to dev (at least one, never all).
inline DevSplit stratified_dev_split(const std::vector<Label>& labels, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, Errc::config, "dev_fraction must be in (0, 1)");
  DevSplit out;
  std::mt19937_64 rng(seed);
  for (auto cls : {Label::BonaFide, Label::Morph}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    if (idx.size() < 2)
      fail(Errc::invalid, "training data needs at least two " + std::string(to_string(cls)) +
                              " samples to carve a development split");
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(idx[i], idx[pick(rng)]);
    }
    auto k = std::size_t(std::llround(fraction * double(idx.size())));
    k = std::clamp<std::size_t>(k, 1, idx.size() - 1);
    out.dev.insert(out.dev.end(), idx.begin(), idx.begin() + std::ptrdiff_t(k));
    out.fit.insert(out.fit.end(), idx.begin() + std::ptrdiff_t(k), idx.end());
  }
  std::sort(out.fit.begin(), out.fit.end());
  std::sort(out.dev.begin(), out.dev.end());
  return out;
}

struct Detector {
  DescriptorConfig descriptor;
  std::string descriptor_canonical;
  std::uint64_t descriptor_hash = 0;
  TrainConfig train;
  ModelGrid models;
  FusionModel fusion;
  std::array<Triple, kNumClassifiers> level1_eers{};
  Triple level2_eers{};
  std::size_t n_fit = 0, n_dev = 0;
  std::string train_selector;  // rows the detector was trained on, e.g. "medium=digital,post=before"

  ScoreSet raw_scores(const FeatureSet& fs) const { return score_probe(models, fs); }
  double score(const FeatureSet& fs) const { return fusion.fuse(raw_scores(fs)); }
  Label decide(double s) const { return smad::decide(s, fusion.threshold); }
};

inline TrainingSet gather(FeatureType t, const std::vector<FeatureSet>& sets, const std::vector<Label>& labels,
                          const std::vector<std::size_t>& rows) {
  TrainingSet ts;
  ts.type = t;
  require(!rows.empty(), Errc::invalid, "gather: no rows");
  const auto d = sets[rows[0]][t].values.size();
  ts.vectors.resize(Eigen::Index(rows.size()), Eigen::Index(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = sets[rows[i]][t].values;
    require(v.size() == d, Errc::invalid, "gather: inconsistent feature dimensionality");
    std::copy(v.begin(), v.end(), ts.vectors.row(Eigen::Index(i)).data());
    ts.labels.push_back(labels[rows[i]]);
  }
  return ts;
}

/// Fits the nine models on the non-dev rows, then fusion and threshold on the dev rows.
inline Detector train_detector(const FeatureExtractor& ex, const std::vector<FeatureSet>& sets,
                               const std::vector<Label>& labels, const TrainConfig& cfg,
                               const std::function<void(const std::string&)>& log = {}) {
  require(sets.size() == labels.size(), Errc::invalid, "train_detector: feature/label count mismatch");
  Detector det;
  det.descriptor = ex.config();
  det.descriptor_canonical = ex.canonical();
  det.descriptor_hash = ex.hash();
  det.train = cfg;

  const auto split = stratified_dev_split(labels, cfg.dev_fraction, cfg.seed);
  det.n_fit = split.fit.size();
  det.n_dev = split.dev.size();
  for (auto f : kFeatureTypes) {
    if (log) log("training " + std::string(to_string(f)) + " models");
    auto space = make_feature_space(gather(f, sets, labels, split.fit));
    det.models(f, ClassifierKind::Svm) = train_linear_svm(space, cfg.svm);
    det.models(f, ClassifierKind::Srkda) = train_srkda(space, cfg.srkda);
    det.models(f, ClassifierKind::Pcrc) = train_pcrc(space, cfg.pcrc);
  }
  for (auto& slot : det.models.slots) {
    slot->meta.seed = cfg.seed;
    slot->meta.descriptor = det.descriptor_canonical;
  }

  std::vector<ScoreSet> dev_scores;
  std::vector<Label> dev_labels;
  for (auto i : split.dev) {
    dev_scores.push_back(det.raw_scores(sets[i]));
    dev_labels.push_back(labels[i]);
  }
  BootstrapOptions bo;
  bo.replicates = cfg.replicates;
  bo.resample = cfg.resample;
  bo.rule = cfg.rule;
  bo.seed = cfg.seed + 1;
  auto est = estimate_weights_bootstrap(dev_scores, dev_labels, bo);
  det.fusion.normalization = est.normalization;
  det.fusion.weights = est.weights;
  det.level1_eers = est.level1_eers;
  det.level2_eers = est.level2_eers;

  LabeledScores dev;
  for (std::size_t i = 0; i < dev_scores.size(); ++i)
    (dev_labels[i] == Label::Morph ? dev.morph : dev.bona_fide).push_back(det.fusion.fuse(dev_scores[i]));
  det.fusion.threshold = d_eer(dev).threshold;
  return det;
}

}  // namespace smad
