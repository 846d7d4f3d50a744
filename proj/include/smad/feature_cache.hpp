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

// On-disk feature matrices, one file per (feature type, partition).
//
//   "SMADFEAT" u32 version, u64 descriptor hash, descriptor text,
//   u8 feature type, u8 partition, u64 rows, u64 dims,
//   rows x {path, u8 label}, rows x dims f64 (row-major), checksum

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smad/binary_io.hpp"
#include "smad/features.hpp"
#include "smad/manifest.hpp"

namespace smad {

inline constexpr char kCacheMagic[8] = {'S', 'M', 'A', 'D', 'F', 'E', 'A', 'T'};
inline constexpr std::uint32_t kCacheVersion = 1;

inline std::filesystem::path cache_file(const std::filesystem::path& dir, FeatureType t, Partition p) {
  return dir / (std::string(to_string(t)) + "_" + std::string(to_string(p)) + ".bin");
}

/// `sets[i]` belongs to `m.rows[i]`.
inline void save_feature_cache(const std::filesystem::path& dir, const DatasetManifest& m,
                               const std::vector<FeatureSet>& sets, const FeatureExtractor& ex) {
  require(sets.size() == m.rows.size(), Errc::invalid, "save_feature_cache: one feature set per manifest row required");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io, "cannot create cache directory '" + dir.string() + "': " + ec.message());
  for (auto part : {Partition::Train, Partition::Test}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m.rows.size(); ++i)
      if (m.rows[i].partition == part) rows.push_back(i);
    for (auto t : kFeatureTypes) {
      BinaryWriter w(cache_file(dir, t, part));
      w.put_raw(kCacheMagic, sizeof kCacheMagic);
      w.put<std::uint32_t>(kCacheVersion);
      w.put<std::uint64_t>(ex.hash());
      w.put_string(ex.canonical());
      w.put<std::uint8_t>(std::uint8_t(t));
      w.put<std::uint8_t>(std::uint8_t(part));
      const std::uint64_t dims = rows.empty() ? 0 : sets[rows[0]][t].values.size();
      w.put<std::uint64_t>(rows.size());
      w.put<std::uint64_t>(dims);
      for (auto i : rows) {
        w.put_string(m.rows[i].path);
        w.put<std::uint8_t>(std::uint8_t(m.rows[i].label));
      }
      for (auto i : rows) {
        const auto& v = sets[i][t].values;
        require(v.size() == dims, Errc::invalid, "save_feature_cache: inconsistent dimensionality");
        w.put_raw(v.data(), v.size() * sizeof(double));
      }
      w.commit();
    }
  }
}

/// Reads every cache file for the manifest; rows must match the manifest exactly.
/// Only rows flagged in `wanted` (if non-empty) are materialized.
inline std::vector<FeatureSet> load_feature_cache(const std::filesystem::path& dir, const DatasetManifest& m,
                                                  const FeatureExtractor& ex, const std::vector<bool>& wanted = {}) {
  std::vector<FeatureSet> out(m.rows.size());
  for (auto part : {Partition::Train, Partition::Test}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m.rows.size(); ++i)
      if (m.rows[i].partition == part) rows.push_back(i);
    for (auto t : kFeatureTypes) {
      const auto path = cache_file(dir, t, part);
      BinaryReader r(path, "feature cache");
      char magic[8];
      r.get_raw(magic, sizeof magic);
      if (!std::equal(magic, magic + 8, kCacheMagic)) fail(Errc::format, "not a feature cache: " + path.string());
      const auto version = r.get<std::uint32_t>();
      if (version != kCacheVersion)
        fail(Errc::version, "feature cache version " + std::to_string(version) + " not supported: " + path.string());
      const auto hash = r.get<std::uint64_t>();
      const auto canonical = r.get_string();
      if (hash != ex.hash() || canonical != ex.canonical())
        fail(Errc::mismatch, "feature cache " + path.string() + " was built with descriptor '" + canonical +
                                 "', current descriptor is '" + ex.canonical() + "'");
      if (r.get<std::uint8_t>() != std::uint8_t(t) || r.get<std::uint8_t>() != std::uint8_t(part))
        fail(Errc::format, "feature cache header does not match its file name: " + path.string());
      const auto n = r.get<std::uint64_t>(), dims = r.get<std::uint64_t>();
      if (n != rows.size())
        fail(Errc::mismatch, "feature cache " + path.string() + " has " + std::to_string(n) + " rows, manifest has " +
                                 std::to_string(rows.size()));
      for (auto i : rows) {
        auto p = r.get_string();
        auto l = r.get<std::uint8_t>();
        if (p != m.rows[i].path || l != std::uint8_t(m.rows[i].label))
          fail(Errc::mismatch, "feature cache " + path.string() + " does not match manifest row '" + m.rows[i].path + "'");
      }
      if (n) r.check_count(n, std::size_t(dims) * sizeof(double));
      std::vector<double> skip;
      for (auto i : rows) {
        auto& v = out[i][t].values;
        if (wanted.empty() || wanted[i]) {
          v.resize(dims);
          r.get_raw(v.data(), dims * sizeof(double));
        } else {
          skip.resize(dims);
          r.get_raw(skip.data(), dims * sizeof(double));
        }
        out[i][t].type = t;
        out[i].source_id = m.rows[i].path;
      }
      if (!r.at_end()) fail(Errc::format, "feature cache has trailing data: " + path.string());
    }
  }
  return out;
}

}  // namespace smad
