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

// Experiment runner: selection, feature extraction, training, scoring and reports.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smad/bundle.hpp"
#include "smad/config.hpp"
#include "smad/detector.hpp"
#include "smad/experiment.hpp"
#include "smad/feature_cache.hpp"
#include "smad/manifest.hpp"
#include "smad/metrics.hpp"

namespace smad {

using LogFn = std::function<void(const std::string&)>;

/// Feature sets for the given manifest rows, from a cache directory or by extraction.
inline std::vector<FeatureSet> features_for_rows(const DatasetManifest& m, const std::vector<std::size_t>& rows,
                                                 const FeatureExtractor& ex, int workers,
                                                 const std::optional<std::filesystem::path>& cache_dir,
                                                 const LogFn& log = {}) {
  if (cache_dir) {
    std::vector<bool> wanted(m.rows.size(), false);
    for (auto i : rows) wanted[i] = true;
    auto all = load_feature_cache(*cache_dir, m, ex, wanted);
    std::vector<FeatureSet> out;
    out.reserve(rows.size());
    for (auto i : rows) out.push_back(std::move(all[i]));
    return out;
  }
  std::vector<std::filesystem::path> paths;
  for (auto i : rows) paths.push_back(m.resolve(m.rows[i]));
  std::size_t step = std::max<std::size_t>(1, paths.size() / 10);
  return extract_all(ex, paths, workers, [&](std::size_t done, std::size_t total) {
    if (log && (done % step == 0 || done == total))
      log("extracted " + std::to_string(done) + "/" + std::to_string(total));
  });
}

inline std::vector<Label> labels_for_rows(const DatasetManifest& m, const std::vector<std::size_t>& rows) {
  std::vector<Label> out;
  for (auto i : rows) out.push_back(m.rows[i].label);
  return out;
}

struct ScoredRow {
  std::size_t row = 0;
  ScoreSet raw;
  double score = 0.0;
  Label decision = Label::BonaFide;
};

/// Scores rows in chunks so only a few feature sets are alive at once.
inline std::vector<ScoredRow> score_rows(const Detector& det, const FeatureExtractor& ex, const DatasetManifest& m,
                                         const std::vector<std::size_t>& rows, int workers,
                                         const std::optional<std::filesystem::path>& cache_dir = {},
                                         const LogFn& log = {}) {
  check_descriptor(det, ex);
  std::vector<ScoredRow> out;
  const std::size_t chunk = cache_dir ? rows.size() : std::size_t(std::max(8, 4 * workers));
  for (std::size_t start = 0; start < rows.size(); start += chunk) {
    std::vector<std::size_t> part(rows.begin() + std::ptrdiff_t(start),
                                  rows.begin() + std::ptrdiff_t(std::min(rows.size(), start + chunk)));
    auto sets = features_for_rows(m, part, ex, workers, cache_dir);
    for (std::size_t k = 0; k < part.size(); ++k) {
      ScoredRow s;
      s.row = part[k];
      s.raw = det.raw_scores(sets[k]);
      s.score = det.fusion.fuse(s.raw);
      s.decision = det.decide(s.score);
      out.push_back(s);
    }
    if (log) log("scored " + std::to_string(out.size()) + "/" + std::to_string(rows.size()));
  }
  return out;
}

inline nlohmann::ordered_json fusion_json(const Detector& det) {
  nlohmann::ordered_json j;
  auto& l1 = j["level1_weights"];
  for (auto c : kClassifierKinds)
    for (auto f : kFeatureTypes)
      l1[std::string(to_string(c))][std::string(to_string(f))] = det.fusion.weights.level1[std::size_t(c)][std::size_t(f)];
  for (auto c : kClassifierKinds)
    j["level2_weights"][std::string(to_string(c))] = det.fusion.weights.level2[std::size_t(c)];
  for (auto c : kClassifierKinds)
    for (auto f : kFeatureTypes)
      j["dev_level1_eer"][std::string(to_string(c))][std::string(to_string(f))] = det.level1_eers[std::size_t(c)][std::size_t(f)];
  for (auto c : kClassifierKinds) j["dev_level2_eer"][std::string(to_string(c))] = det.level2_eers[std::size_t(c)];
  j["threshold"] = det.fusion.threshold;
  j["weight_rule"] = std::string(to_string(det.train.rule));
  j["replicates"] = det.train.replicates;
  return j;
}

/// Deterministic report: no timestamps, no absolute paths.
inline nlohmann::ordered_json make_report(const Detector& det, const std::string& protocol, const std::string& test_selector,
                                          const std::vector<ScoredRow>& scored, const DatasetManifest& m) {
  LabeledScores fused;
  std::array<LabeledScores, kNumStreams> streams;
  for (const auto& s : scored) {
    const bool morph = m.rows[s.row].label == Label::Morph;
    (morph ? fused.morph : fused.bona_fide).push_back(s.score);
    for (auto f : kFeatureTypes)
      for (auto c : kClassifierKinds)
        (morph ? streams[stream_index(f, c)].morph : streams[stream_index(f, c)].bona_fide).push_back(s.raw.at(f, c));
  }
  const auto report = evaluate(fused);
  std::size_t errors = 0;
  for (const auto& s : scored) errors += s.decision != m.rows[s.row].label;

  nlohmann::ordered_json j;
  j["format"] = "smad-report/1";
  j["protocol"] = protocol;
  j["train_select"] = det.train_selector;
  j["test_select"] = test_selector;
  j["seed"] = det.train.seed;
  j["descriptor"] = det.descriptor_canonical;
  j["training"] = {{"fit", det.n_fit}, {"dev", det.n_dev}};
  j["fusion"] = fusion_json(det);
  j["metrics"] = to_json(report);
  j["operating_point"] = {{"threshold", det.fusion.threshold},
                          {"errors", errors},
                          {"error_rate", scored.empty() ? 0.0 : double(errors) / double(scored.size())}};
  auto& st = j["stream_d_eer"];
  for (auto f : kFeatureTypes)
    for (auto c : kClassifierKinds)
      st[std::string(to_string(f)) + "/" + std::string(to_string(c))] = d_eer(streams[stream_index(f, c)]).eer;
  return j;
}

inline EvalReport report_metrics(const std::vector<ScoredRow>& scored, const DatasetManifest& m) {
  LabeledScores fused;
  for (const auto& s : scored) (m.rows[s.row].label == Label::Morph ? fused.morph : fused.bona_fide).push_back(s.score);
  return evaluate(fused);
}

/// Trains a detector on the training-partition rows matching `train_sel`.
inline Detector train_on_manifest(const DatasetManifest& m, const Selector& train_sel, const Config& cfg,
                                  const std::optional<std::filesystem::path>& cache_dir = {}, const LogFn& log = {}) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    if (m.rows[i].partition == Partition::Train && train_sel.matches(m.rows[i])) rows.push_back(i);
  if (rows.empty()) fail(Errc::invalid, "no training rows match [" + train_sel.str() + "]");
  FeatureExtractor ex(cfg.descriptor);
  if (log) log("training rows: " + std::to_string(rows.size()) + " [" + train_sel.str() + "]");
  auto sets = features_for_rows(m, rows, ex, cfg.workers, cache_dir, log);
  auto det = train_detector(ex, sets, labels_for_rows(m, rows), cfg.train, log);
  det.train_selector = train_sel.str();
  return det;
}

struct ExperimentResult {
  Detector detector;
  EvalReport report;
  nlohmann::ordered_json report_json;
  std::vector<ScoredRow> scores;
  double extract_train_seconds = 0, train_seconds = 0, score_seconds = 0;
};

/// Full pipeline for one protocol cell.
inline ExperimentResult run_experiment(const DatasetManifest& m, const ExperimentSpec& spec, const Config& cfg,
                                       const std::optional<std::filesystem::path>& cache_dir = {},
                                       const LogFn& log = {}) {
  validate_protocol(spec);
  const auto sel = select_rows(m, spec);
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };

  ExperimentResult r;
  FeatureExtractor ex(cfg.descriptor);
  auto t0 = clock::now();
  {
    auto sets = features_for_rows(m, sel.train, ex, cfg.workers, cache_dir, log);
    r.extract_train_seconds = secs(t0);
    t0 = clock::now();
    r.detector = train_detector(ex, sets, labels_for_rows(m, sel.train), cfg.train, log);
    r.detector.train_selector = spec.train.str();
    r.train_seconds = secs(t0);
  }
  t0 = clock::now();
  r.scores = score_rows(r.detector, ex, m, sel.test, cfg.workers, cache_dir, log);
  r.score_seconds = secs(t0);
  r.report = report_metrics(r.scores, m);
  r.report_json = make_report(r.detector, std::string(to_string(spec.protocol)), spec.test.str(), r.scores, m);
  return r;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(Errc::io, "cannot write '" + path.string() + "'");
    os << text;
    if (!os) fail(Errc::io, "write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::io, "cannot rename into '" + path.string() + "': " + ec.message());
}

inline std::string det_csv(const std::vector<DetPoint>& pts) {
  std::ostringstream os;
  write_det_csv(os, pts);
  return os.str();
}

/// runs/<UTC timestamp>-<hash>/{report.json, det.csv, bundle.bin, config.json}
inline std::filesystem::path write_run_dir(const std::filesystem::path& runs_root, const ExperimentResult& r,
                                           const ExperimentSpec& spec, const Config& cfg,
                                           const std::filesystem::path& manifest_path) {
  const auto report_text = r.report_json.dump(2) + "\n";
  const auto now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  char hash[20];
  std::snprintf(hash, sizeof hash, "%08llx",
                static_cast<unsigned long long>(fnv1a64(to_json(cfg).dump() + spec.label()) & 0xffffffffULL));
  auto dir = runs_root / (std::string(stamp) + "-" + hash);
  for (int k = 2; std::filesystem::exists(dir); ++k) dir = runs_root / (std::string(stamp) + "-" + hash + "-" + std::to_string(k));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io, "cannot create run directory '" + dir.string() + "': " + ec.message());

  write_text_atomic(dir / "report.json", report_text);
  write_text_atomic(dir / "det.csv", det_csv(r.report.det_points));
  save_bundle(r.detector, dir / "bundle.bin");
  nlohmann::ordered_json rec;
  rec["config"] = to_json(cfg);
  rec["experiment"] = {{"protocol", std::string(to_string(spec.protocol))},
                       {"train_select", spec.train.str()},
                       {"test_select", spec.test.str()}};
  rec["manifest"] = std::filesystem::absolute(manifest_path).string();
  rec["seed"] = cfg.train.seed;
  rec["timings_seconds"] = {{"extract_train", r.extract_train_seconds},
                            {"train", r.train_seconds},
                            {"score_test", r.score_seconds}};
  rec["created_utc"] = stamp;
  write_text_atomic(dir / "config.json", rec.dump(2) + "\n");
  return dir;
}

}  // namespace smad
