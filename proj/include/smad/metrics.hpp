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

// ISO/IEC 30107-3 style error rates over labelled scores (higher = morph).
//
// APCER(t) = #{morph < t} / #morph      BPCER(t) = #{bona fide >= t} / #bona fide
//
// Thresholds are swept over the sorted distinct scores, the midpoints between
// neighbours and one value above the maximum. Rates are compared as exact
// count ratios and only converted to double on output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smad/error.hpp"

namespace smad {

struct LabeledScores {
  std::vector<double> bona_fide;
  std::vector<double> morph;

  void validate() const {
    if (bona_fide.empty()) fail(Errc::invalid, "no bona fide scores");
    if (morph.empty()) fail(Errc::invalid, "no morph scores");
    for (double v : bona_fide)
      if (!std::isfinite(v)) fail(Errc::invalid, "non-finite bona fide score");
    for (double v : morph)
      if (!std::isfinite(v)) fail(Errc::invalid, "non-finite morph score");
  }
};

inline double apcer(std::span<const double> morph, double threshold) {
  require(!morph.empty(), Errc::invalid, "apcer: no morph scores");
  auto n = std::count_if(morph.begin(), morph.end(), [&](double s) { return s < threshold; });
  return double(n) / double(morph.size());
}

inline double bpcer(std::span<const double> bona_fide, double threshold) {
  require(!bona_fide.empty(), Errc::invalid, "bpcer: no bona fide scores");
  auto n = std::count_if(bona_fide.begin(), bona_fide.end(), [&](double s) { return s >= threshold; });
  return double(n) / double(bona_fide.size());
}

/// One threshold with its exact error counts.
struct OperatingPoint {
  double threshold = 0.0;
  std::uint64_t morph_below = 0;       // APCER numerator
  std::uint64_t bona_at_or_above = 0;  // BPCER numerator
  std::uint64_t n_morph = 0;
  std::uint64_t n_bona = 0;

  double apcer() const { return double(morph_below) / double(n_morph); }
  double bpcer() const { return double(bona_at_or_above) / double(n_bona); }
};

inline std::vector<double> candidate_thresholds(const LabeledScores& ls) {
  std::vector<double> all(ls.bona_fide);
  all.insert(all.end(), ls.morph.begin(), ls.morph.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> t;
  t.reserve(2 * all.size() + 1);
  for (std::size_t i = 0; i < all.size(); ++i) {
    t.push_back(all[i]);
    if (i + 1 < all.size()) {
      const double mid = all[i] + (all[i + 1] - all[i]) / 2.0;
      if (mid > all[i] && mid < all[i + 1]) t.push_back(mid);
    }
  }
  t.push_back(all.back() + 1.0);
  return t;
}

/// Operating points at every candidate threshold, ascending.
inline std::vector<OperatingPoint> sweep(const LabeledScores& ls) {
  ls.validate();
  std::vector<double> bona(ls.bona_fide), morph(ls.morph);
  std::sort(bona.begin(), bona.end());
  std::sort(morph.begin(), morph.end());
  std::vector<OperatingPoint> pts;
  std::size_t im = 0, ib = 0;
  for (double t : candidate_thresholds(ls)) {
    while (im < morph.size() && morph[im] < t) ++im;
    while (ib < bona.size() && bona[ib] < t) ++ib;
    pts.push_back({t, im, bona.size() - ib, morph.size(), bona.size()});
  }
  return pts;
}

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  OperatingPoint point;
};

/// Threshold minimizing |APCER - BPCER| (lowest threshold on ties); D-EER is the mean of the two rates there.
inline EerResult d_eer(const LabeledScores& ls) {
  auto pts = sweep(ls);
  const OperatingPoint* best = nullptr;
  std::uint64_t best_gap = 0;
  for (const auto& p : pts) {
    const std::uint64_t a = p.morph_below * p.n_bona, b = p.bona_at_or_above * p.n_morph;
    const std::uint64_t gap = a > b ? a - b : b - a;
    if (!best || gap < best_gap) best = &p, best_gap = gap;
  }
  EerResult r;
  r.point = *best;
  r.threshold = best->threshold;
  r.eer = double(best->morph_below * best->n_bona + best->bona_at_or_above * best->n_morph) /
          (2.0 * double(best->n_morph) * double(best->n_bona));
  return r;
}

struct BpcerAtApcer {
  double target = 0.0;
  double bpcer = 0.0;
  double apcer = 0.0;
  double threshold = 0.0;
  bool attainable = true;
};

/// Lowest BPCER among operating points with APCER <= target, i.e. the highest such threshold.
/// When no point qualifies (target < 0) the point with the smallest APCER is reported and flagged.
inline BpcerAtApcer bpcer_at_apcer(const LabeledScores& ls, double target) {
  auto pts = sweep(ls);
  const OperatingPoint* chosen = nullptr;
  for (const auto& p : pts)
    if (double(p.morph_below) <= target * double(p.n_morph)) chosen = &p;
  BpcerAtApcer r;
  r.target = target;
  if (!chosen) {
    chosen = &pts.front();
    r.attainable = false;
  }
  r.bpcer = chosen->bpcer();
  r.apcer = chosen->apcer();
  r.threshold = chosen->threshold;
  return r;
}

struct DetPoint {
  double threshold, apcer, bpcer;
};

inline std::vector<DetPoint> det_curve(const LabeledScores& ls) {
  std::vector<DetPoint> out;
  for (const auto& p : sweep(ls)) out.push_back({p.threshold, p.apcer(), p.bpcer()});
  return out;
}

inline constexpr const char* kEerDefinition =
    "min |APCER-BPCER| over sorted distinct scores, midpoints and max+1; ties -> lowest threshold; "
    "D-EER = (APCER+BPCER)/2; APCER uses morph < t, BPCER uses bona fide >= t";

struct EvalReport {
  double d_eer = 0.0;
  double eer_threshold = 0.0;
  std::map<std::string, BpcerAtApcer> bpcer_at_apcer;  // key: target formatted "0.05"
  std::vector<DetPoint> det_points;
  std::size_t n_bona = 0, n_morph = 0;
};

inline std::string format_target(double target) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << target;
  return os.str();
}

inline EvalReport evaluate(const LabeledScores& ls, std::span<const double> targets = std::vector<double>{0.05, 0.10}) {
  EvalReport r;
  auto e = d_eer(ls);
  r.d_eer = e.eer;
  r.eer_threshold = e.threshold;
  for (double t : targets) r.bpcer_at_apcer[format_target(t)] = bpcer_at_apcer(ls, t);
  r.det_points = det_curve(ls);
  r.n_bona = ls.bona_fide.size();
  r.n_morph = ls.morph.size();
  return r;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["d_eer"] = r.d_eer;
  j["eer_threshold"] = r.eer_threshold;
  auto& at = j["bpcer_at_apcer"];
  at = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.bpcer_at_apcer)
    at[k] = {{"bpcer", v.bpcer}, {"apcer", v.apcer}, {"threshold", v.threshold}, {"attainable", v.attainable}};
  j["counts"] = {{"bona_fide", r.n_bona}, {"morph", r.n_morph}};
  j["eer_definition"] = kEerDefinition;
  auto& det = j["det_points"];
  det = nlohmann::ordered_json::array();
  for (const auto& p : r.det_points) det.push_back({{"threshold", p.threshold}, {"apcer", p.apcer}, {"bpcer", p.bpcer}});
  return j;
}

inline void write_det_csv(std::ostream& os, const std::vector<DetPoint>& pts) {
  os << "threshold,apcer,bpcer\n";
  os << std::setprecision(17);
  for (const auto& p : pts) os << p.threshold << ',' << p.apcer << ',' << p.bpcer << '\n';
}

/// Human-readable summary in percent with two decimals.
inline void print_report(std::ostream& os, const EvalReport& r) {
  auto pct = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << 100.0 * v;
    return s.str();
  };
  os << "D-EER(%): " << pct(r.d_eer) << "\n";
  for (const auto& [k, v] : r.bpcer_at_apcer)
    os << "BPCER(%) @ APCER=" << pct(v.target) << "%: " << pct(v.bpcer) << (v.attainable ? "" : " (unattainable)")
       << "\n";
}

}  // namespace smad
