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

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace elec {

/// Rank-sum (Mann-Whitney) AUC; tied scores share average ranks, which
/// credits tied pairs 0.5. Throws UndefinedMetricError unless both classes
/// are present.
double auc(std::span<const std::uint8_t> labels, std::span<const double> scores);

/// Mean binary cross-entropy with scores clamped to [eps, 1 - eps]. Throws
/// UndefinedMetricError on empty input.
double logloss(std::span<const std::uint8_t> labels, std::span<const double> scores, double eps = 1e-7);

struct LatencyStats {
  double mean = 0.0;  // seconds per sample
  double p50 = 0.0;
  double p99 = 0.0;
  std::size_t repetitions = 0;
  std::size_t samples_per_repetition = 0;
  std::uint64_t store_reads_per_repetition = 0;
};

struct EvalReport {
  std::string model;  // checkpoint tag
  std::string split;
  double auc = 0.0;
  double logloss = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::optional<LatencyStats> latency;
};

EvalReport evaluate(std::span<const std::uint8_t> labels, std::span<const double> scores);

/// "key: value" lines; metrics carry four decimals.
std::string format_report(const EvalReport& r);

/// One "key=value ..." line for scripts.
std::string format_report_line(const EvalReport& r);

}  // namespace elec
