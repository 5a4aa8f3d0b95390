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

// Subcommands behind the `elec` binary. Each cmd_* writes its artifacts under
// RunConfig::output_dir together with "<command>.config", the fully
// resolved configuration.

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "elec/config.hpp"
#include "elec/error.hpp"
#include "elec/metrics.hpp"

namespace elec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitIo = 4;

int exit_code_for(Error::Category category);

struct PrepareSummary {
  std::size_t rows = 0;       // data rows read, malformed included
  std::size_t written = 0;
  std::size_t malformed = 0;
  std::size_t positives = 0;
};

/// Converts a raw rated CSV into data.csv (label = rating > threshold) and
/// writes split_{train,val,test}.txt manifests of row keys. Malformed rows
/// are skipped and counted; ParseError when their share exceeds
/// prepare.max_bad_fraction.
PrepareSummary cmd_prepare(const std::filesystem::path& raw, const RunConfig& config, std::ostream& log);

/// text.tsv for every row of data.path, id = row key.
std::size_t cmd_textualize(const RunConfig& config);

/// Stage 1. Writes the adapter checkpoint and mllm_loss.log.
void cmd_train_mllm(const RunConfig& config, std::ostream& log);

/// Stage 2. Writes gain.ckpt, vanilla.ckpt and metrics.log.
void cmd_train(const RunConfig& config, std::ostream& log);

/// split: train, val, test or all. Writes eval_<tag>_<split>.txt.
EvalReport cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint, std::string_view split);

/// Per-sample latency on the first bench.samples test rows. Writes
/// bench_<tag>.txt.
EvalReport cmd_bench(const RunConfig& config, const std::filesystem::path& checkpoint);

/// Writes a generated dataset to `out_csv` and returns its schema string.
std::string cmd_synth(const std::filesystem::path& out_csv, std::uint64_t seed, std::size_t n_train,
                      std::size_t n_val, std::size_t n_test);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace elec
