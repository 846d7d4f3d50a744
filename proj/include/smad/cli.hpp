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

// Command implementations behind the `smad` executable. Machine-readable output
// goes to `out`, progress and summaries to `log`.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "smad/runner.hpp"
#include "smad/synth.hpp"

namespace smad::cli {

struct Io {
  std::ostream& out;
  std::ostream& log;
  LogFn logger() const {
    return [this](const std::string& s) { log << s << '\n'; };
  }
};

inline Config load_config_or_default(const std::optional<std::filesystem::path>& path) {
  return path ? load_config(*path) : Config{};
}

/// Applies --seed / --workers overrides on top of the config file.
inline Config resolve_config(const std::optional<std::filesystem::path>& path, std::optional<std::uint64_t> seed,
                             std::optional<int> workers) {
  auto cfg = load_config_or_default(path);
  if (seed) cfg.train.seed = *seed;
  if (workers) cfg.workers = *workers;
  cfg.validate();
  return cfg;
}

template <typename E, typename F>
std::vector<E> parse_list(const std::string& text, F parse_one) {
  std::vector<E> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_one(item));
  if (out.empty()) fail(Errc::config, "empty list '" + text + "'");
  return out;
}

struct SynthArgs {
  std::filesystem::path out;
  int n = 100;
  std::uint64_t seed = 7;
  double ghost = SynthOptions{}.ghost_amplitude;
  int size = 320;
  std::string media = "digital", posts = "before", compression = "no";
};

inline int cmd_synth(const SynthArgs& a, const Io& io) {
  SynthOptions o;
  o.n_per_class = a.n;
  o.seed = a.seed;
  o.ghost_amplitude = a.ghost;
  o.size = a.size;
  o.media = parse_list<Medium>(a.media, [](const std::string& s) { return parse_medium(s); });
  o.posts = parse_list<Post>(a.posts, [](const std::string& s) { return parse_post(s); });
  o.compression = parse_list<bool>(a.compression, [](const std::string& s) { return parse_compressed(s); });
  auto m = generate_synthetic_dataset(a.out, o);
  print_summary(io.log, m.summary());
  io.out << (a.out / "manifest.csv").string() << '\n';
  return 0;
}

struct ExtractArgs {
  std::filesystem::path manifest, out;
  std::optional<std::filesystem::path> config;
  std::optional<int> workers;
};

inline int cmd_extract(const ExtractArgs& a, const Io& io) {
  auto cfg = resolve_config(a.config, std::nullopt, a.workers);
  auto m = load_manifest(a.manifest);
  print_summary(io.log, m.summary());
  FeatureExtractor ex(cfg.descriptor);
  std::vector<std::size_t> rows(m.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  auto sets = features_for_rows(m, rows, ex, cfg.workers, std::nullopt, io.logger());
  save_feature_cache(a.out, m, sets, ex);
  for (auto p : {Partition::Train, Partition::Test})
    for (auto t : kFeatureTypes) io.out << cache_file(a.out, t, p).string() << '\n';
  return 0;
}

struct TrainArgs {
  std::filesystem::path manifest, out;
  std::optional<std::filesystem::path> config, cache;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string train_select;
};

inline int cmd_train(const TrainArgs& a, const Io& io) {
  auto cfg = resolve_config(a.config, a.seed, a.workers);
  auto m = load_manifest(a.manifest, !a.cache.has_value());
  print_summary(io.log, m.summary());
  auto det = train_on_manifest(m, parse_selector(a.train_select), cfg, a.cache, io.logger());
  save_bundle(det, a.out);
  io.log << "dev threshold " << std::setprecision(6) << det.fusion.threshold << ", bundle written\n";
  io.out << a.out.string() << '\n';
  return 0;
}

struct ScoreArgs {
  std::filesystem::path bundle;
  std::optional<std::filesystem::path> image, manifest, csv;
  std::string test_select;
  std::optional<int> workers;
};

inline void write_score_csv(std::ostream& os, const std::vector<std::pair<std::string, ScoredRow>>& rows) {
  os << "path,score,decision\n" << std::setprecision(17);
  for (const auto& [path, s] : rows) os << detail::csv_field(path) << ',' << s.score << ',' << to_string(s.decision) << '\n';
}

inline int cmd_score(const ScoreArgs& a, const Io& io) {
  if (a.image.has_value() == a.manifest.has_value()) fail(Errc::config, "score: give exactly one of --image or --manifest");
  auto [det, ex] = load_bundle_with_extractor(a.bundle);
  std::vector<std::pair<std::string, ScoredRow>> rows;
  if (a.image) {
    auto fs = ex.extract_file(*a.image);
    ScoredRow s;
    s.raw = det.raw_scores(fs);
    s.score = det.fusion.fuse(s.raw);
    s.decision = det.decide(s.score);
    rows.emplace_back(a.image->string(), s);
  } else {
    auto m = load_manifest(*a.manifest);
    auto sel = parse_selector(a.test_select);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m.rows.size(); ++i)
      if (sel.matches(m.rows[i])) idx.push_back(i);
    if (idx.empty()) fail(Errc::invalid, "score: no manifest rows match [" + sel.str() + "]");
    for (auto& s : score_rows(det, ex, m, idx, a.workers.value_or(1), std::nullopt, io.logger()))
      rows.emplace_back(m.rows[s.row].path, s);
  }
  if (a.csv) {
    std::ostringstream os;
    write_score_csv(os, rows);
    write_text_atomic(*a.csv, os.str());
  } else {
    write_score_csv(io.out, rows);
  }
  return 0;
}

struct EvaluateArgs {
  std::filesystem::path bundle, manifest, out;
  std::string protocol = "intra";
  std::string test_select;
  std::optional<std::filesystem::path> cache;
  std::optional<int> workers;
};

inline int cmd_evaluate(const EvaluateArgs& a, const Io& io) {
  auto [det, ex] = load_bundle_with_extractor(a.bundle);
  ExperimentSpec spec{parse_protocol(a.protocol), parse_selector(det.train_selector), parse_selector(a.test_select)};
  validate_protocol(spec);
  auto m = load_manifest(a.manifest, !a.cache.has_value());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    if (m.rows[i].partition == Partition::Test && spec.test.matches(m.rows[i])) idx.push_back(i);
  std::size_t morph = 0;
  for (auto i : idx) morph += m.rows[i].label == Label::Morph;
  if (morph == 0 || morph == idx.size())
    fail(Errc::invalid, "evaluate: test selection [" + spec.test.str() + "] must contain both classes");
  auto scored = score_rows(det, ex, m, idx, a.workers.value_or(1), a.cache, io.logger());
  auto report = report_metrics(scored, m);
  auto json = make_report(det, std::string(to_string(spec.protocol)), spec.test.str(), scored, m);
  std::error_code ec;
  std::filesystem::create_directories(a.out, ec);
  if (ec) fail(Errc::io, "cannot create '" + a.out.string() + "': " + ec.message());
  write_text_atomic(a.out / "report.json", json.dump(2) + "\n");
  write_text_atomic(a.out / "det.csv", det_csv(report.det_points));
  print_report(io.log, report);
  io.out << (a.out / "report.json").string() << '\n';
  return 0;
}

struct RunArgs {
  std::filesystem::path manifest, out = "runs";
  std::optional<std::filesystem::path> config, cache;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string protocol = "intra";
  std::string train_select, test_select;
};

inline int cmd_run(const RunArgs& a, const Io& io) {
  auto cfg = resolve_config(a.config, a.seed, a.workers);
  ExperimentSpec spec{parse_protocol(a.protocol), parse_selector(a.train_select), parse_selector(a.test_select)};
  validate_protocol(spec);
  auto m = load_manifest(a.manifest, !a.cache.has_value());
  print_summary(io.log, m.summary());
  auto r = run_experiment(m, spec, cfg, a.cache, io.logger());
  auto dir = write_run_dir(a.out, r, spec, cfg, a.manifest);
  print_report(io.log, r.report);
  io.out << dir.string() << '\n';
  return 0;
}

struct ProtocolsArgs {
  std::filesystem::path manifest, out = "runs";
  std::optional<std::filesystem::path> config, cache;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool dry_run = false;
};

/// Enumerates (and unless dry_run, runs) every cell of the three experiments.
inline int cmd_protocols(const ProtocolsArgs& a, const Io& io) {
  auto cfg = resolve_config(a.config, a.seed, a.workers);
  auto m = load_manifest(a.manifest, !a.cache.has_value() && !a.dry_run);
  std::vector<Medium> media;
  for (auto md : kMedia)
    for (const auto& r : m.rows)
      if (r.medium == md) {
        media.push_back(md);
        break;
      }
  const auto cells = enumerate_protocol_cells(media);
  io.out << "table,protocol,train_select,test_select,train_rows,test_rows,d_eer,bpcer_at_apcer_0.05,bpcer_at_apcer_0.10,run_dir\n";
  for (const auto& c : cells) {
    validate_protocol(c.spec);
    auto sel = select_rows(m, c.spec);
    io.out << c.table << ',' << to_string(c.spec.protocol) << ',' << detail::csv_field(c.spec.train.str()) << ','
           << detail::csv_field(c.spec.test.str()) << ',' << sel.train.size() << ',' << sel.test.size();
    if (a.dry_run) {
      io.out << ",,,,\n";
      continue;
    }
    io.log << "cell " << c.spec.label() << '\n';
    auto r = run_experiment(m, c.spec, cfg, a.cache, io.logger());
    auto dir = write_run_dir(a.out, r, c.spec, cfg, a.manifest);
    io.out << std::setprecision(6) << ',' << r.report.d_eer << ',' << r.report.bpcer_at_apcer.at("0.05").bpcer << ','
           << r.report.bpcer_at_apcer.at("0.10").bpcer << ',' << detail::csv_field(dir.string()) << '\n';
  }
  io.log << cells.size() << " protocol cells\n";
  return 0;
}

inline int cmd_describe_dims(const std::optional<std::filesystem::path>& config, const Io& io) {
  auto cfg = load_config_or_default(config);
  const auto rows = describe_dims(cfg.descriptor);
  io.out << "k,sub_image,width,height,lbp,hog,bsif\n";
  for (const auto& r : rows)
    io.out << r.k << ',' << r.label << ',' << r.dims.width << ',' << r.dims.height << ',' << r.lbp << ',' << r.hog << ','
           << r.bsif << '\n';
  const auto d = feature_dims(cfg.descriptor);
  io.out << "total,,,," << d.lbp << ',' << d.hog << ',' << d.bsif << '\n';
  return 0;
}

inline int cmd_manifest(const std::filesystem::path& path, const Io& io) {
  auto m = load_manifest(path);
  print_summary(io.out, m.summary());
  return 0;
}

}  // namespace smad::cli
