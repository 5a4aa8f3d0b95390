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

// Parameter container file. Layout (all integers little-endian):
//
//   magic     "ELCK"
//   version   u32 = 1
//   tag       u32 length + bytes          ("gain", "vanilla", "adapter", ...)
//   meta      u32 count, then count x (key string, value string), key-sorted
//   records   u32 count, then per record:
//               name   u32 length + bytes
//               ndim   u32
//               dims   ndim x u64
//               frozen u8
//               values prod(dims) x IEEE-754 binary32
//
// Strings are u32 length + raw UTF-8 bytes, no terminator.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "elec/nn.hpp"

namespace elec {

inline constexpr char kCheckpointMagic[4] = {'E', 'L', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TensorRecord {
  std::string name;
  std::vector<std::uint64_t> shape;
  bool frozen = false;
  std::vector<float> values;

  friend bool operator==(const TensorRecord&, const TensorRecord&) = default;
};

struct Checkpoint {
  std::string tag;
  std::map<std::string, std::string> meta;
  std::vector<TensorRecord> records;

  const TensorRecord& find(const std::string& name) const;
  const std::string& meta_at(const std::string& key) const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Appends one record per parameter (values narrowed to binary32).
void append_params(Checkpoint& ckpt, std::span<Parameter* const> params);

/// Restores values by name; throws FormatError on a missing name or shape
/// mismatch. Values are widened from binary32.
void restore_params(const Checkpoint& ckpt, std::span<Parameter* const> params);

}  // namespace elec
