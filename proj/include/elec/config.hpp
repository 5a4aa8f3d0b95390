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

// Run configuration. The file grammar is one "key = value" per line; blank
// lines and lines starting with '#' are ignored; later assignments win.
// Every key and its default is listed by `elec config-keys` and in README.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "elec/collab.hpp"
#include "elec/data.hpp"
#include "elec/mllm.hpp"
#include "elec/siamese.hpp"

namespace elec {

enum class StoreMode { file, hash };

struct RunConfig {
  std::filesystem::path data_path = "data.csv";
  FieldSchema schema;
  SplitRatios split{};
  std::uint64_t split_seed = 7;

  CollabConfig collab{};
  std::vector<std::size_t> adapter_dims{512, 256, 128};

  StoreMode store_mode = StoreMode::hash;
  std::filesystem::path store_path = "store.bin";
  std::size_t hash_dim = 128;
  std::uint64_t hash_seed = 0;

  MllmTrainConfig mllm{};
  TrainConfig train{};

  std::filesystem::path output_dir = "out";
  std::filesystem::path adapter_checkpoint;  // empty: <output_dir>/adapter.ckpt

  std::string rating_column = "rating";
  double rating_threshold = 3.0;
  double max_bad_fraction = 0.01;

  std::size_t bench_repetitions = 10;
  std::size_t bench_samples = 100;

  std::filesystem::path adapter_path() const;
};

/// Applies one key. Throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Applies every assignment in `text`.
void apply_config_text(RunConfig& config, std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

/// Full resolved configuration, one "key = value" per line, key-sorted.
std::string config_to_text(const RunConfig& config);

std::map<std::string, std::string> config_to_map(const RunConfig& config);

/// "name:cat:capacity" / "name:text" entries, comma separated.
FieldSchema parse_schema(std::string_view text);
std::string format_schema(const FieldSchema& schema);

}  // namespace elec
