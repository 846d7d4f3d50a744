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

// Experiment protocols and row selectors.
//
//   intra                     train and test share medium and post-processing state
//   inter_medium              different medium, same post-processing state
//   inter_medium_varied_post  different post-processing state between train and test

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "smad/error.hpp"
#include "smad/manifest.hpp"

namespace smad {

enum class Protocol { Intra, InterMedium, InterMediumVariedPost };

inline constexpr std::array<Protocol, 3> kProtocols{Protocol::Intra, Protocol::InterMedium,
                                                    Protocol::InterMediumVariedPost};

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Intra: return "intra";
    case Protocol::InterMedium: return "inter-medium";
    case Protocol::InterMediumVariedPost: return "inter-medium-varied-post";
  }
  return "?";
}

/// Accepts both dash and underscore spellings.
inline Protocol parse_protocol(std::string_view s) {
  std::string t(s);
  for (auto& c : t)
    if (c == '_') c = '-';
  for (auto p : kProtocols)
    if (t == to_string(p)) return p;
  fail(Errc::config, "unknown protocol '" + std::string(s) + "' (expected intra|inter-medium|inter-medium-varied-post)");
}

/// Conjunction over (medium, post, compressed); unset fields match anything.
struct Selector {
  std::optional<Medium> medium;
  std::optional<Post> post;
  std::optional<bool> compressed;

  bool matches(const ManifestRow& r) const {
    return (!medium || *medium == r.medium) && (!post || *post == r.post) && (!compressed || *compressed == r.compressed);
  }

  std::string str() const {
    std::string out;
    auto add = [&](std::string_view k, std::string_view v) {
      if (!out.empty()) out += ',';
      out += std::string(k) + "=" + std::string(v);
    };
    if (medium) add("medium", to_string(*medium));
    if (post) add("post", to_string(*post));
    if (compressed) add("compressed", compressed_string(*compressed));
    return out.empty() ? "*" : out;
  }

  friend bool operator==(const Selector&, const Selector&) = default;
};

/// "medium=ps1,post=after,compressed=no"; any subset of the keys, each at most once.
inline Selector parse_selector(std::string_view text) {
  Selector s;
  std::string_view rest = text;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) fail(Errc::config, "selector term '" + std::string(item) + "' lacks '='");
    auto key = item.substr(0, eq), value = item.substr(eq + 1);
    try {
      if (key == "medium") {
        if (s.medium) fail(Errc::config, "medium given twice");
        s.medium = parse_medium(value);
      } else if (key == "post") {
        if (s.post) fail(Errc::config, "post given twice");
        s.post = parse_post(value);
      } else if (key == "compressed") {
        if (s.compressed) fail(Errc::config, "compressed given twice");
        s.compressed = parse_compressed(value);
      } else {
        fail(Errc::config, "unknown selector key '" + std::string(key) + "'");
      }
    } catch (const Error& e) {
      fail(Errc::config, "selector '" + std::string(text) + "': " + e.what());
    }
  }
  return s;
}

struct ExperimentSpec {
  Protocol protocol = Protocol::Intra;
  Selector train;
  Selector test;

  std::string label() const {
    return std::string(to_string(protocol)) + " train[" + train.str() + "] test[" + test.str() + "]";
  }
};

/// Throws Errc::protocol when the selectors do not describe a legal cell of the protocol.
inline void validate_protocol(const ExperimentSpec& spec) {
  const auto& a = spec.train;
  const auto& b = spec.test;
  auto violation = [&](const std::string& why) { fail(Errc::protocol, spec.label() + ": " + why); };
  if (!a.medium || !b.medium) violation("both selectors must fix the medium");
  if (!a.post || !b.post) violation("both selectors must fix the post-processing state");
  switch (spec.protocol) {
    case Protocol::Intra:
      if (*a.medium != *b.medium) violation("intra protocol requires the same medium for training and testing");
      if (*a.post != *b.post) violation("intra protocol requires the same post-processing state");
      if (a.compressed != b.compressed) violation("intra protocol requires the same compression setting");
      break;
    case Protocol::InterMedium:
      if (*a.medium == *b.medium) violation("inter-medium protocol requires different media");
      if (*a.post != *b.post) violation("inter-medium protocol requires the same post-processing state");
      break;
    case Protocol::InterMediumVariedPost:
      if (*a.post == *b.post) violation("varied-post protocol requires different post-processing states");
      break;
  }
}

/// One cell of the benchmark tables.
struct ProtocolCell {
  std::string table;  // "exp1", "exp2-before", "exp2-after", "exp3-after-before", "exp3-before-after"
  ExperimentSpec spec;
};

/// Every train/test cell of the three experiments for the supplied media, with and without compression.
inline std::vector<ProtocolCell> enumerate_protocol_cells(const std::vector<Medium>& media = {kMedia.begin(),
                                                                                             kMedia.end()}) {
  std::vector<ProtocolCell> cells;
  auto sel = [](Medium m, Post p, bool c) { return Selector{m, p, c}; };
  for (auto m : media)
    for (auto p : kPosts)
      for (bool c : {false, true}) cells.push_back({"exp1", {Protocol::Intra, sel(m, p, c), sel(m, p, c)}});
  for (auto p : kPosts)
    for (auto tr : media)
      for (auto te : media) {
        if (tr == te) continue;
        for (bool c : {false, true})
          cells.push_back({p == Post::Before ? "exp2-before" : "exp2-after",
                           {Protocol::InterMedium, sel(tr, p, c), sel(te, p, c)}});
      }
  for (auto [ptr, pte, name] : {std::tuple{Post::After, Post::Before, "exp3-after-before"},
                                std::tuple{Post::Before, Post::After, "exp3-before-after"}})
    for (auto tr : media)
      for (auto te : media) {
        if (tr == te) continue;
        for (bool c : {false, true})
          cells.push_back({name, {Protocol::InterMediumVariedPost, sel(tr, ptr, c), sel(te, pte, c)}});
      }
  return cells;
}

/// Manifest row indices for the training and testing sides of a spec.
struct RowSelection {
  std::vector<std::size_t> train, test;
};

inline RowSelection select_rows(const DatasetManifest& m, const ExperimentSpec& spec) {
  RowSelection out;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const auto& r = m.rows[i];
    if (r.partition == Partition::Train && spec.train.matches(r)) out.train.push_back(i);
    if (r.partition == Partition::Test && spec.test.matches(r)) out.test.push_back(i);
  }
  auto check = [&](const std::vector<std::size_t>& idx, const char* side) {
    std::size_t morph = 0;
    for (auto i : idx) morph += m.rows[i].label == Label::Morph;
    if (idx.empty()) fail(Errc::invalid, spec.label() + ": empty " + side + " selection");
    if (morph == 0 || morph == idx.size())
      fail(Errc::invalid, spec.label() + ": " + side + " selection must contain both bona fide and morph rows");
  };
  check(out.train, "training");
  check(out.test, "testing");
  std::set<std::string> train_subjects;
  for (auto i : out.train)
    for (auto& s : contributing_subjects(m.rows[i].subject_id)) train_subjects.insert(s);
  for (auto i : out.test)
    for (auto& s : contributing_subjects(m.rows[i].subject_id))
      if (train_subjects.count(s)) fail(Errc::leakage, spec.label() + ": subject '" + s + "' in both train and test");
  return out;
}

}  // namespace smad
