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

// Regenerates the pinned BSIF filter bank (binary file + embedded header).
//
//   make_bsif_bank <out.bin> <out.inc>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "smad/bsif_bank.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: make_bsif_bank <out.bin> <out.inc>\n";
    return 2;
  }
  try {
    smad::FilterBank bank = smad::learn_bsif_bank();
    bank.validate(8, 11);
    bank.save(argv[1]);

    std::ofstream inc(argv[2]);
    inc << "// Generated by tools/make_bsif_bank.cpp. Do not edit.\n";
    inc << "// 8 filters, 11x11, filter-major then row-major; checksum 0x" << std::hex << bank.checksum()
        << std::dec << "\n";
    char buf[64];
    for (std::size_t i = 0; i < bank.taps.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%a,", bank.taps[i]);
      inc << buf << ((i % 4 == 3) ? "\n" : " ");
    }
    inc << "\n";
    std::cerr << "wrote bank checksum 0x" << std::hex << bank.checksum() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_bsif_bank: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
