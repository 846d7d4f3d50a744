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

#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "smad/error.hpp"
#include "smad/imaging.hpp"

namespace smad::test {

inline ImagePlane random_plane(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImagePlane p(w, h);
  for (auto& v : p.data) v = u(rng);
  return p;
}

inline RgbImage random_rgb(int w, int h, std::mt19937_64& rng) {
  return {random_plane(w, h, rng), random_plane(w, h, rng), random_plane(w, h, rng)};
}

inline RgbImage solid_rgb(int w, int h, double r, double g, double b) {
  return {ImagePlane(w, h, r), ImagePlane(w, h, g), ImagePlane(w, h, b)};
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("smad_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Runs `fn` and returns the smad error code it raised.
template <typename F>
Errc error_code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected smad::Error";
  return Errc::invalid;
}

template <typename F>
std::string error_message_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected smad::Error";
  return {};
}

}  // namespace smad::test
