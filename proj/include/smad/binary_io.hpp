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

// Little-endian binary containers with a trailing FNV-1a 64 checksum.
// Both directions stream, so large feature caches and bundles are never held twice.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "smad/error.hpp"

static_assert(std::endian::native == std::endian::little, "binary containers assume a little-endian host");

namespace smad {

class Fnv1a64 {
 public:
  void update(const void* data, std::size_t n) {
    auto p = static_cast<const unsigned char*>(data);
    std::uint64_t h = h_;
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
    h_ = h;
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  Fnv1a64 h;
  h.update(s.data(), s.size());
  return h.digest();
}

namespace detail {
/// Temp file currently being written, for interrupt handlers (which may only call unlink()).
inline char g_pending_tmp[4096] = {};
inline void set_pending_tmp(const std::filesystem::path& p) {
  const auto s = p.string();
  if (s.size() < sizeof g_pending_tmp) std::memcpy(g_pending_tmp, s.c_str(), s.size() + 1);
}
inline void clear_pending_tmp() { g_pending_tmp[0] = '\0'; }
}  // namespace detail

/// Writes to `<path>.tmp` and renames on commit(); an abandoned writer removes its temp file.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::filesystem::path path) : path_(std::move(path)), tmp_(path_) {
    tmp_ += ".tmp";
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) fail(Errc::io, "cannot write " + tmp_.string());
    detail::set_pending_tmp(tmp_);
  }
  BinaryWriter(const BinaryWriter&) = delete;
  BinaryWriter& operator=(const BinaryWriter&) = delete;
  ~BinaryWriter() {
    detail::clear_pending_tmp();
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T v) {
    put_raw(&v, sizeof(T));
  }
  void put_string(std::string_view s) {
    put<std::uint64_t>(s.size());
    put_raw(s.data(), s.size());
  }
  void put_doubles(std::span<const double> v) {
    put<std::uint64_t>(v.size());
    put_raw(v.data(), v.size() * sizeof(double));
  }
  void put_raw(const void* p, std::size_t n) {
    hash_.update(p, n);
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) fail(Errc::io, "short write to " + tmp_.string());
  }

  void commit() {
    const std::uint64_t digest = hash_.digest();
    out_.write(reinterpret_cast<const char*>(&digest), sizeof digest);
    out_.close();
    if (!out_) fail(Errc::io, "short write to " + tmp_.string());
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) fail(Errc::io, "cannot rename " + tmp_.string() + " to " + path_.string() + ": " + ec.message());
    committed_ = true;
  }

 private:
  std::filesystem::path path_, tmp_;
  std::ofstream out_;
  Fnv1a64 hash_;
  bool committed_ = false;
};

class BinaryReader {
 public:
  /// Verifies the trailing checksum in a first pass, then positions at the start for parsing.
  BinaryReader(const std::filesystem::path& path, std::string what) : path_(path), what_(std::move(what)) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
      fail(Errc::io, what_ + " not found or unreadable: " + path.string());
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) fail(Errc::io, what_ + " not readable: " + path.string());
    if (size < sizeof(std::uint64_t)) fail(Errc::checksum, what_ + " truncated: " + path.string());
    payload_ = size - sizeof(std::uint64_t);
    in_.open(path, std::ios::binary);
    if (!in_) fail(Errc::io, what_ + " not readable: " + path.string());

    Fnv1a64 h;
    std::vector<char> chunk(1 << 20);
    std::uint64_t left = payload_;
    while (left > 0) {
      auto n = std::min<std::uint64_t>(left, chunk.size());
      in_.read(chunk.data(), static_cast<std::streamsize>(n));
      if (!in_) fail(Errc::checksum, what_ + " truncated: " + path.string());
      h.update(chunk.data(), n);
      left -= n;
    }
    std::uint64_t stored = 0;
    in_.read(reinterpret_cast<char*>(&stored), sizeof stored);
    if (!in_ || h.digest() != stored)
      fail(Errc::checksum, what_ + " checksum mismatch (truncated or corrupt): " + path.string());
    in_.seekg(0);
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T v;
    get_raw(&v, sizeof(T));
    return v;
  }
  std::string get_string() {
    auto n = get<std::uint64_t>();
    check_count(n, 1);
    std::string s(n, '\0');
    get_raw(s.data(), n);
    return s;
  }
  std::vector<double> get_doubles() {
    auto n = get<std::uint64_t>();
    check_count(n, sizeof(double));
    std::vector<double> v(n);
    get_raw(v.data(), n * sizeof(double));
    return v;
  }
  void get_raw(void* p, std::size_t n) {
    if (n > payload_ - pos_) fail(Errc::format, what_ + ": unexpected end of payload in " + path_.string());
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) fail(Errc::io, what_ + ": read error in " + path_.string());
    pos_ += n;
  }
  /// Guards allocations driven by length fields.
  void check_count(std::uint64_t count, std::size_t elem) {
    if (count > (payload_ - pos_) / elem) fail(Errc::format, what_ + ": length field exceeds payload in " + path_.string());
  }
  bool at_end() const { return pos_ == payload_; }
  const std::string& what() const { return what_; }

 private:
  std::filesystem::path path_;
  std::string what_;
  std::ifstream in_;
  std::uint64_t payload_ = 0;
  std::uint64_t pos_ = 0;
};

}  // namespace smad
