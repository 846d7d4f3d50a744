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

// Two-level weighted-sum score fusion.
//
// Level 1: for each classifier, a weighted sum over the three feature streams.
// Level 2: a weighted sum over the three classifier-level scores.
// Raw streams are min-max normalized on the development split first; weights are
// proportional to (1 - mean bootstrapped D-EER) of each input stream.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smad/classifiers.hpp"
#include "smad/error.hpp"
#include "smad/metrics.hpp"

namespace smad {

inline constexpr int kNumStreams = kNumFeatureTypes * kNumClassifiers;

inline std::size_t stream_index(FeatureType f, ClassifierKind c) {
  return std::size_t(f) * kNumClassifiers + std::size_t(c);
}

using Triple = std::array<double, 3>;

/// Per-stream min/max learned on the development split, indexed by stream_index.
struct NormalizationParams {
  std::array<double, kNumStreams> min{};
  std::array<double, kNumStreams> max{};
  std::array<bool, kNumStreams> degenerate{};
};

inline NormalizationParams fit_normalization(std::span<const ScoreSet> scores) {
  require(!scores.empty(), Errc::invalid, "fit_normalization: no scores");
  NormalizationParams p;
  for (auto f : kFeatureTypes)
    for (auto c : kClassifierKinds) {
      const auto k = stream_index(f, c);
      double lo = scores[0].at(f, c), hi = lo;
      for (const auto& s : scores) lo = std::min(lo, s.at(f, c)), hi = std::max(hi, s.at(f, c));
      p.min[k] = lo;
      p.max[k] = hi;
      p.degenerate[k] = !(hi > lo);
    }
  return p;
}

/// Min-max map to [0,1] per stream, clipped outside the learned range. Degenerate streams map to 0.
inline ScoreSet normalize_scores(const NormalizationParams& p, const ScoreSet& ss) {
  ScoreSet out;
  for (auto f : kFeatureTypes)
    for (auto c : kClassifierKinds) {
      const auto k = stream_index(f, c);
      out.at(f, c) = p.degenerate[k] ? 0.0 : std::clamp((ss.at(f, c) - p.min[k]) / (p.max[k] - p.min[k]), 0.0, 1.0);
    }
  return out;
}

struct FusionWeights {
  std::array<Triple, kNumClassifiers> level1{};  // [classifier][feature]
  Triple level2{};                               // [classifier]

  static FusionWeights uniform() {
    FusionWeights w;
    for (auto& t : w.level1) t.fill(1.0 / 3.0);
    w.level2.fill(1.0 / 3.0);
    return w;
  }
};

/// s_c = sum_f w[c][f] * score(f, c) for each classifier c.
inline Triple fuse_level1(const FusionWeights& w, const ScoreSet& normalized) {
  Triple out{};
  for (auto c : kClassifierKinds) {
    double acc = 0.0;
    for (auto f : kFeatureTypes) acc += w.level1[std::size_t(c)][std::size_t(f)] * normalized.at(f, c);
    out[std::size_t(c)] = acc;
  }
  return out;
}

inline double fuse_level2(const FusionWeights& w, const Triple& level1) {
  double acc = 0.0;
  for (std::size_t c = 0; c < 3; ++c) acc += w.level2[c] * level1[c];
  return acc;
}

enum class WeightRule { OneMinusEer, InverseEer };

inline std::string_view to_string(WeightRule r) { return r == WeightRule::OneMinusEer ? "one_minus_eer" : "inverse_eer"; }

/// Stream weights from error rates; degenerate streams get 0, the rest are normalized to sum 1.
inline Triple weights_from_eers(const Triple& eers, const std::array<bool, 3>& degenerate,
                                WeightRule rule = WeightRule::OneMinusEer) {
  Triple w{};
  int live = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (degenerate[i]) continue;
    ++live;
    w[i] = rule == WeightRule::OneMinusEer ? std::max(0.0, 1.0 - eers[i]) : 1.0 / std::max(eers[i], 0.01);
  }
  if (live == 0) fail(Errc::invalid, "fusion: every stream in a triple is degenerate (constant scores)");
  double sum = w[0] + w[1] + w[2];
  if (!(sum > 0)) {
    // Every live stream is at or beyond chance; fall back to equal weights over them.
    for (std::size_t i = 0; i < 3; ++i) w[i] = degenerate[i] ? 0.0 : 1.0;
    sum = double(live);
  }
  for (auto& v : w) v /= sum;
  return w;
}

struct BootstrapOptions {
  int replicates = 100;
  std::uint64_t seed = 42;
  bool resample = true;  // false: every replicate uses the development scores as-is
  WeightRule rule = WeightRule::OneMinusEer;
};

/// Class-stratified resampling indices for one replicate.
struct ReplicateIndices {
  std::vector<std::size_t> bona, morph;
};

namespace detail {

inline std::vector<ReplicateIndices> draw_replicates(std::size_t n_bona, std::size_t n_morph,
                                                     const BootstrapOptions& opt, std::uint64_t stream_seed) {
  std::vector<ReplicateIndices> reps(std::size_t(opt.replicates));
  std::mt19937_64 rng(stream_seed);
  for (auto& r : reps) {
    r.bona.resize(n_bona);
    r.morph.resize(n_morph);
    if (opt.resample) {
      std::uniform_int_distribution<std::size_t> pb(0, n_bona - 1), pm(0, n_morph - 1);
      for (auto& i : r.bona) i = pb(rng);
      for (auto& i : r.morph) i = pm(rng);
    } else {
      std::iota(r.bona.begin(), r.bona.end(), 0);
      std::iota(r.morph.begin(), r.morph.end(), 0);
    }
  }
  return reps;
}

inline double mean_replicate_eer(const std::vector<double>& bona, const std::vector<double>& morph,
                                 const std::vector<ReplicateIndices>& reps) {
  double acc = 0.0;
  LabeledScores ls;
  for (const auto& r : reps) {
    ls.bona_fide.clear();
    ls.morph.clear();
    for (auto i : r.bona) ls.bona_fide.push_back(bona[i]);
    for (auto i : r.morph) ls.morph.push_back(morph[i]);
    acc += d_eer(ls).eer;
  }
  return acc / double(reps.size());
}

inline bool is_constant(const std::vector<double>& a, const std::vector<double>& b) {
  double lo = a.empty() ? b.front() : a.front(), hi = lo;
  for (double v : a) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : b) lo = std::min(lo, v), hi = std::max(hi, v);
  return !(hi > lo);
}

}  // namespace detail

/// Mean bootstrapped D-EER of one stream (exposed for inspection and tests).
inline double bootstrap_mean_eer(const std::vector<double>& bona, const std::vector<double>& morph,
                                 const BootstrapOptions& opt) {
  require(!bona.empty() && !morph.empty(), Errc::invalid, "bootstrap: both classes required");
  require(opt.replicates >= 1, Errc::invalid, "bootstrap: replicates must be >= 1");
  return detail::mean_replicate_eer(bona, morph, detail::draw_replicates(bona.size(), morph.size(), opt, opt.seed));
}

struct FusionEstimate {
  NormalizationParams normalization;
  FusionWeights weights;
  std::array<Triple, kNumClassifiers> level1_eers{};  // [classifier][feature]
  Triple level2_eers{};
};

/// Learns normalization and both weight levels from labelled development scores.
inline FusionEstimate estimate_weights_bootstrap(std::span<const ScoreSet> dev, std::span<const Label> labels,
                                                 const BootstrapOptions& opt = {}) {
  require(dev.size() == labels.size(), Errc::invalid, "estimate_weights_bootstrap: score/label count mismatch");
  require(opt.replicates >= 1, Errc::invalid, "estimate_weights_bootstrap: replicates must be >= 1");
  std::size_t nb = 0, nm = 0;
  for (auto l : labels) (l == Label::Morph ? nm : nb)++;
  if (nb == 0 || nm == 0) fail(Errc::invalid, "estimate_weights_bootstrap: development set must contain both classes");

  FusionEstimate est;
  est.normalization = fit_normalization(dev);
  std::vector<ScoreSet> norm;
  norm.reserve(dev.size());
  for (const auto& s : dev) norm.push_back(normalize_scores(est.normalization, s));

  auto split = [&](auto&& value_of) {
    std::pair<std::vector<double>, std::vector<double>> bm;
    for (std::size_t i = 0; i < norm.size(); ++i)
      (labels[i] == Label::Morph ? bm.second : bm.first).push_back(value_of(i));
    return bm;
  };

  // Paired bootstrap: the same resampled rows are used for every stream of a level.
  const auto reps1 = detail::draw_replicates(nb, nm, opt, opt.seed);
  for (auto c : kClassifierKinds) {
    Triple eers{};
    std::array<bool, 3> degenerate{};
    for (auto f : kFeatureTypes) {
      auto [b, m] = split([&](std::size_t i) { return norm[i].at(f, c); });
      degenerate[std::size_t(f)] = est.normalization.degenerate[stream_index(f, c)];
      eers[std::size_t(f)] = degenerate[std::size_t(f)] ? 1.0 : detail::mean_replicate_eer(b, m, reps1);
    }
    est.level1_eers[std::size_t(c)] = eers;
    est.weights.level1[std::size_t(c)] = weights_from_eers(eers, degenerate, opt.rule);
  }

  std::vector<Triple> fused1;
  fused1.reserve(norm.size());
  for (const auto& s : norm) fused1.push_back(fuse_level1(est.weights, s));
  const auto reps2 = detail::draw_replicates(nb, nm, opt, opt.seed ^ 0x9e3779b97f4a7c15ULL);
  std::array<bool, 3> degenerate2{};
  for (std::size_t c = 0; c < 3; ++c) {
    auto [b, m] = split([&](std::size_t i) { return fused1[i][c]; });
    degenerate2[c] = detail::is_constant(b, m);
    est.level2_eers[c] = degenerate2[c] ? 1.0 : detail::mean_replicate_eer(b, m, reps2);
  }
  est.weights.level2 = weights_from_eers(est.level2_eers, degenerate2, opt.rule);
  return est;
}

/// Normalization, both fusion levels and the operating threshold.
struct FusionModel {
  NormalizationParams normalization;
  FusionWeights weights = FusionWeights::uniform();
  double threshold = 0.5;

  double fuse(const ScoreSet& raw) const {
    return fuse_level2(weights, fuse_level1(weights, normalize_scores(normalization, raw)));
  }
};

/// Morph iff score >= threshold.
inline Label decide(double score, double threshold) { return score >= threshold ? Label::Morph : Label::BonaFide; }

}  // namespace smad
