// Copyright 2026 The ELEC Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Little-endian primitives for the on-disk formats, independent of host
// byte order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "elec/error.hpp"

namespace elec::binio {

template <typename U>
void put_uint(std::ostream& out, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
  out.write(buf, sizeof(U));
}

inline void put_f32(std::ostream& out, float f) { put_uint(out, std::bit_cast<std::uint32_t>(f)); }

inline void put_string(std::ostream& out, const std::string& s) {
  put_uint(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

// Readers throw CorruptionError on short reads.
template <typename U>
U get_uint(std::istream& in, const char* what) {
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(U))) {
    throw CorruptionError(std::string("truncated input while reading ") + what);
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

inline float get_f32(std::istream& in, const char* what) {
  return std::bit_cast<float>(get_uint<std::uint32_t>(in, what));
}

inline std::string get_string(std::istream& in, const char* what, std::uint32_t max_len = 1u << 20) {
  const auto n = get_uint<std::uint32_t>(in, what);
  if (n > max_len) throw CorruptionError(std::string("implausible string length in ") + what);
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) throw CorruptionError(std::string("truncated ") + what);
  return s;
}

}  // namespace elec::binio
