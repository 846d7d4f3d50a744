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

// Run configuration: descriptor settings, classifier hyperparameters, fusion
// settings, seed and worker count.
//
// Accepted as JSON or as a small TOML-like text format:
//
//   # comment                      (also after values)
//   seed = 42                      top-level keys: seed, workers
//   [descriptor]                   sections: descriptor, svm, srkda, pcrc, fusion
//   working_size = 320             values: integer, real, true/false, "string"
//   bsif_bank = "builtin"
//
// Unknown sections or keys and mistyped values are rejected.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "smad/detector.hpp"
#include "smad/error.hpp"
#include "smad/features.hpp"

namespace smad {

struct Config {
  DescriptorConfig descriptor;
  TrainConfig train;
  int workers = 1;

  void validate() const {
    descriptor.validate();
    require(workers >= 1 && workers <= 256, Errc::config, "workers must be in [1,256]");
    require(train.svm.c > 0, Errc::config, "svm.c must be positive");
    require(train.svm.gap_tolerance > 0, Errc::config, "svm.gap_tolerance must be positive");
    require(train.svm.max_iterations > 0, Errc::config, "svm.max_iterations must be positive");
    require(train.srkda.delta > 0, Errc::config, "srkda.delta must be positive");
    require(train.srkda.sigma >= 0, Errc::config, "srkda.sigma must be >= 0 (0 selects the median heuristic)");
    require(train.pcrc.lambda > 0, Errc::config, "pcrc.lambda must be positive");
    require(train.replicates >= 1, Errc::config, "fusion.replicates must be >= 1");
    require(train.dev_fraction > 0 && train.dev_fraction < 1, Errc::config, "fusion.dev_fraction must be in (0,1)");
  }
};

namespace detail {

inline std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

inline nlohmann::json parse_toml_value(const std::string& raw, const std::string& where) {
  if (raw.empty()) fail(Errc::config, where + ": missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(Errc::config, where + ": unterminated string");
    return raw.substr(1, raw.size() - 2);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  std::size_t used = 0;
  try {
    if (raw.find_first_of(".eE") == std::string::npos) {
      long long v = std::stoll(raw, &used);
      if (used == raw.size()) return v;
    } else {
      double v = std::stod(raw, &used);
      if (used == raw.size()) return v;
    }
  } catch (const std::exception&) {
  }
  fail(Errc::config, where + ": cannot parse value '" + raw + "'");
}

/// TOML-like text -> nested JSON object.
inline nlohmann::json parse_toml_like(std::istream& in) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* section = &root;
  std::string line, section_name;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno);
    // Strip comments outside strings.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(Errc::config, where + ": malformed section header");
      section_name = trim(line.substr(1, line.size() - 2));
      if (section_name.empty()) fail(Errc::config, where + ": empty section name");
      if (root.contains(section_name)) fail(Errc::config, where + ": section [" + section_name + "] repeated");
      root[section_name] = nlohmann::json::object();
      section = &root[section_name];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(Errc::config, where + ": expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) fail(Errc::config, where + ": empty key");
    if (section->contains(key)) fail(Errc::config, where + ": key '" + key + "' repeated");
    (*section)[key] = parse_toml_value(value, where);
  }
  return root;
}

template <typename T>
void take(const nlohmann::json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  const std::string name = path.empty() ? key : path + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(Errc::config, "config key '" + name + "' must be true or false");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(Errc::config, "config key '" + name + "' must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(Errc::config, "config key '" + name + "' must be an integer");
    if (v.is_number_unsigned()) out = T(v.get<std::uint64_t>());
    else {
      auto x = v.get<std::int64_t>();
      if (std::is_unsigned_v<T> && x < 0) fail(Errc::config, "config key '" + name + "' must be non-negative");
      out = T(x);
    }
  } else {
    if (!v.is_number()) fail(Errc::config, "config key '" + name + "' must be a number");
    out = v.get<double>();
  }
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(Errc::config, "config section '" + path + "' must be a table/object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(Errc::config, "unknown config key '" + (path.empty() ? it.key() : path + "." + it.key()) + "'");
}

}  // namespace detail

inline Config config_from_json(const nlohmann::json& j) {
  using detail::reject_unknown;
  using detail::take;
  Config c;
  reject_unknown(j, "", {"seed", "workers", "descriptor", "svm", "srkda", "pcrc", "fusion"});
  take(j, "", "seed", c.train.seed);
  take(j, "", "workers", c.workers);
  if (j.contains("descriptor")) {
    const auto& d = j.at("descriptor");
    reject_unknown(d, "descriptor",
                   {"working_size", "crop_fraction", "pyramid_levels", "lbp_radius", "hog_cell", "hog_bins", "hog_clip",
                    "bsif_size", "bsif_bits", "bsif_bank"});
    auto& o = c.descriptor;
    take(d, "descriptor", "working_size", o.working_size);
    take(d, "descriptor", "crop_fraction", o.crop_fraction);
    take(d, "descriptor", "pyramid_levels", o.pyramid_levels);
    take(d, "descriptor", "lbp_radius", o.lbp_radius);
    take(d, "descriptor", "hog_cell", o.hog_cell);
    take(d, "descriptor", "hog_bins", o.hog_bins);
    take(d, "descriptor", "hog_clip", o.hog_clip);
    take(d, "descriptor", "bsif_size", o.bsif_size);
    take(d, "descriptor", "bsif_bits", o.bsif_bits);
    take(d, "descriptor", "bsif_bank", o.bsif_bank);
  }
  if (j.contains("svm")) {
    const auto& s = j.at("svm");
    reject_unknown(s, "svm", {"c", "gap_tolerance", "max_iterations"});
    take(s, "svm", "c", c.train.svm.c);
    take(s, "svm", "gap_tolerance", c.train.svm.gap_tolerance);
    take(s, "svm", "max_iterations", c.train.svm.max_iterations);
  }
  if (j.contains("srkda")) {
    const auto& s = j.at("srkda");
    reject_unknown(s, "srkda", {"delta", "sigma"});
    take(s, "srkda", "delta", c.train.srkda.delta);
    take(s, "srkda", "sigma", c.train.srkda.sigma);
  }
  if (j.contains("pcrc")) {
    const auto& s = j.at("pcrc");
    reject_unknown(s, "pcrc", {"lambda"});
    take(s, "pcrc", "lambda", c.train.pcrc.lambda);
  }
  if (j.contains("fusion")) {
    const auto& s = j.at("fusion");
    reject_unknown(s, "fusion", {"replicates", "resample", "rule", "dev_fraction"});
    take(s, "fusion", "replicates", c.train.replicates);
    take(s, "fusion", "resample", c.train.resample);
    take(s, "fusion", "dev_fraction", c.train.dev_fraction);
    std::string rule = std::string(to_string(c.train.rule));
    take(s, "fusion", "rule", rule);
    if (rule == "one_minus_eer") c.train.rule = WeightRule::OneMinusEer;
    else if (rule == "inverse_eer") c.train.rule = WeightRule::InverseEer;
    else fail(Errc::config, "fusion.rule must be \"one_minus_eer\" or \"inverse_eer\"");
  }
  c.validate();
  return c;
}

inline nlohmann::ordered_json to_json(const Config& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.train.seed;
  j["workers"] = c.workers;
  const auto& d = c.descriptor;
  j["descriptor"] = {{"working_size", d.working_size}, {"crop_fraction", d.crop_fraction},
                     {"pyramid_levels", d.pyramid_levels}, {"lbp_radius", d.lbp_radius},
                     {"hog_cell", d.hog_cell},         {"hog_bins", d.hog_bins},
                     {"hog_clip", d.hog_clip},         {"bsif_size", d.bsif_size},
                     {"bsif_bits", d.bsif_bits},       {"bsif_bank", d.bsif_bank}};
  j["svm"] = {{"c", c.train.svm.c}, {"gap_tolerance", c.train.svm.gap_tolerance},
              {"max_iterations", c.train.svm.max_iterations}};
  j["srkda"] = {{"delta", c.train.srkda.delta}, {"sigma", c.train.srkda.sigma}};
  j["pcrc"] = {{"lambda", c.train.pcrc.lambda}};
  j["fusion"] = {{"replicates", c.train.replicates},
                 {"resample", c.train.resample},
                 {"rule", std::string(to_string(c.train.rule))},
                 {"dev_fraction", c.train.dev_fraction}};
  return j;
}

/// JSON if the first non-blank character is '{', TOML-like otherwise.
inline Config parse_config(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::config, std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
  }
  std::istringstream in(text);
  return config_from_json(detail::parse_toml_like(in));
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace smad
