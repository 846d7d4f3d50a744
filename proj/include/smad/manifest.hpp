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

// Labelled image inventory.
//
// CSV with header: path,label,medium,post,compressed,partition,subject_id
// Paths are resolved relative to the manifest's directory. A morph's subject_id
// names its contributors joined by '+', e.g. "s0003+s0011".

#include <algorithm>
#include <cstdio>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smad/classifiers.hpp"
#include "smad/error.hpp"

namespace smad {

enum class Medium { Digital = 0, Ps1 = 1, Ps2 = 2 };
enum class Post { Before = 0, After = 1 };
enum class Partition { Train = 0, Test = 1 };

inline constexpr std::array<Medium, 3> kMedia{Medium::Digital, Medium::Ps1, Medium::Ps2};
inline constexpr std::array<Post, 2> kPosts{Post::Before, Post::After};

inline std::string_view to_string(Medium m) {
  switch (m) {
    case Medium::Digital: return "digital";
    case Medium::Ps1: return "ps1";
    case Medium::Ps2: return "ps2";
  }
  return "?";
}
inline std::string_view to_string(Post p) { return p == Post::Before ? "before" : "after"; }
inline std::string_view to_string(Partition p) { return p == Partition::Train ? "train" : "test"; }
inline std::string_view compressed_string(bool c) { return c ? "yes" : "no"; }

inline Medium parse_medium(std::string_view s) {
  if (s == "digital") return Medium::Digital;
  if (s == "ps1") return Medium::Ps1;
  if (s == "ps2") return Medium::Ps2;
  fail(Errc::format, "unknown medium '" + std::string(s) + "' (expected digital|ps1|ps2)");
}
inline Post parse_post(std::string_view s) {
  if (s == "before") return Post::Before;
  if (s == "after") return Post::After;
  fail(Errc::format, "unknown post '" + std::string(s) + "' (expected before|after)");
}
inline Partition parse_partition(std::string_view s) {
  if (s == "train") return Partition::Train;
  if (s == "test") return Partition::Test;
  fail(Errc::format, "unknown partition '" + std::string(s) + "' (expected train|test)");
}
inline Label parse_label(std::string_view s) {
  if (s == "bonafide") return Label::BonaFide;
  if (s == "morph") return Label::Morph;
  fail(Errc::format, "unknown label '" + std::string(s) + "' (expected bonafide|morph)");
}
inline bool parse_compressed(std::string_view s) {
  if (s == "yes") return true;
  if (s == "no") return false;
  fail(Errc::format, "unknown compressed value '" + std::string(s) + "' (expected yes|no)");
}

struct ManifestRow {
  std::string path;  // as written in the manifest
  Label label = Label::BonaFide;
  Medium medium = Medium::Digital;
  Post post = Post::Before;
  bool compressed = false;
  Partition partition = Partition::Train;
  std::string subject_id;
};

/// Individual subjects behind a row ("a+b" -> {a, b}).
inline std::vector<std::string> contributing_subjects(const std::string& subject_id) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = subject_id.find('+', start);
    auto part = subject_id.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!part.empty()) out.push_back(part);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

struct ManifestSummary {
  // counts[partition][medium][label]
  std::array<std::array<std::array<std::size_t, 2>, 3>, 2> counts{};
  std::size_t rows = 0;
  std::size_t train_subjects = 0, test_subjects = 0;

  std::size_t count(Partition p, Medium m, Label l) const { return counts[std::size_t(p)][std::size_t(m)][std::size_t(l)]; }
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRow> rows;

  std::filesystem::path resolve(const ManifestRow& r) const {
    std::filesystem::path p(r.path);
    return p.is_absolute() ? p : base_dir / p;
  }

  ManifestSummary summary() const {
    ManifestSummary s;
    s.rows = rows.size();
    std::set<std::string> subj[2];
    for (const auto& r : rows) {
      s.counts[std::size_t(r.partition)][std::size_t(r.medium)][std::size_t(r.label)]++;
      for (auto& id : contributing_subjects(r.subject_id)) subj[std::size_t(r.partition)].insert(id);
    }
    s.train_subjects = subj[0].size();
    s.test_subjects = subj[1].size();
    return s;
  }

  /// Duplicate paths and subject leakage across partitions.
  void validate() const {
    if (rows.empty()) fail(Errc::format, "manifest has no rows");
    std::set<std::string> seen;
    for (const auto& r : rows)
      if (!seen.insert(r.path).second) fail(Errc::format, "duplicate manifest path '" + r.path + "'");
    std::set<std::string> train;
    for (const auto& r : rows)
      if (r.partition == Partition::Train)
        for (auto& id : contributing_subjects(r.subject_id)) train.insert(id);
    for (const auto& r : rows)
      if (r.partition == Partition::Test)
        for (auto& id : contributing_subjects(r.subject_id))
          if (train.count(id)) fail(Errc::leakage, "subject '" + id + "' appears in both train and test partitions");
  }

  void check_files() const {
    for (const auto& r : rows)
      if (!std::filesystem::is_regular_file(resolve(r)))
        fail(Errc::io, "manifest references missing file '" + resolve(r).string() + "'");
  }
};

inline constexpr std::array<std::string_view, 7> kManifestColumns{"path",      "label",     "medium",    "post",
                                                                  "compressed", "partition", "subject_id"};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
      else if (ch == '"') quoted = false;
      else cur += ch;
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) fail(Errc::format, "unterminated quote in manifest line: " + line);
  out.push_back(std::move(cur));
  return out;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace detail

/// Parses manifest text; `base_dir` anchors relative paths. Does not touch the filesystem.
inline DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  m.base_dir = base_dir;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (!header) {
      if (f.size() != kManifestColumns.size() || !std::equal(f.begin(), f.end(), kManifestColumns.begin()))
        fail(Errc::format, "manifest header must be 'path,label,medium,post,compressed,partition,subject_id'");
      header = true;
      continue;
    }
    if (f.size() != kManifestColumns.size())
      fail(Errc::format, "manifest line " + std::to_string(lineno) + ": expected 7 fields, got " + std::to_string(f.size()));
    try {
      ManifestRow r;
      r.path = f[0];
      r.label = parse_label(f[1]);
      r.medium = parse_medium(f[2]);
      r.post = parse_post(f[3]);
      r.compressed = parse_compressed(f[4]);
      r.partition = parse_partition(f[5]);
      r.subject_id = f[6];
      if (r.path.empty()) fail(Errc::format, "empty path");
      if (contributing_subjects(r.subject_id).empty()) fail(Errc::format, "empty subject_id");
      m.rows.push_back(std::move(r));
    } catch (const Error& e) {
      fail(e.code(), "manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) fail(Errc::format, "manifest is empty");
  m.validate();
  return m;
}

/// Reads, validates and checks that every referenced file exists.
inline DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open manifest '" + path.string() + "'");
  auto m = parse_manifest(in, std::filesystem::absolute(path).parent_path());
  if (check_files) m.check_files();
  return m;
}

inline void write_manifest(std::ostream& os, const DatasetManifest& m) {
  for (std::size_t i = 0; i < kManifestColumns.size(); ++i) os << (i ? "," : "") << kManifestColumns[i];
  os << '\n';
  for (const auto& r : m.rows)
    os << detail::csv_field(r.path) << ',' << to_string(r.label) << ',' << to_string(r.medium) << ','
       << to_string(r.post) << ',' << compressed_string(r.compressed) << ',' << to_string(r.partition) << ','
       << detail::csv_field(r.subject_id) << '\n';
}

inline void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(Errc::io, "cannot write manifest '" + path.string() + "'");
    write_manifest(os, m);
    if (!os) fail(Errc::io, "write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline void print_summary(std::ostream& os, const ManifestSummary& s) {
  os << "manifest: " << s.rows << " rows, " << s.train_subjects << " train subjects, " << s.test_subjects
     << " test subjects\n";
  os << "  partition  medium   bonafide  morph\n";
  for (auto p : {Partition::Train, Partition::Test})
    for (auto m : kMedia) {
      auto b = s.count(p, m, Label::BonaFide), mo = s.count(p, m, Label::Morph);
      if (b + mo == 0) continue;
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %-9s  %-7s  %8zu  %5zu\n", std::string(to_string(p)).c_str(),
                    std::string(to_string(m)).c_str(), b, mo);
      os << buf;
    }
}

}  // namespace smad
