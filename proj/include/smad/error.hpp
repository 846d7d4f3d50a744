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

#include <stdexcept>
#include <string>

namespace smad {

/// Broad failure category, so callers and tests can branch without parsing messages.
enum class Errc {
  io,          // missing/unreadable/unwritable file
  format,      // undecodable or unsupported content
  invalid,     // precondition violated by the caller
  checksum,    // truncated or corrupted container
  version,     // container written by an incompatible build
  mismatch,    // descriptor configuration differs from the one expected
  leakage,     // subject appears in both partitions
  protocol,    // experiment selectors violate the protocol
  config,      // configuration schema error
};

inline const char* to_string(Errc e) {
  switch (e) {
    case Errc::io: return "io";
    case Errc::format: return "format";
    case Errc::invalid: return "invalid";
    case Errc::checksum: return "checksum";
    case Errc::version: return "version";
    case Errc::mismatch: return "mismatch";
    case Errc::leakage: return "leakage";
    case Errc::protocol: return "protocol";
    case Errc::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace smad
