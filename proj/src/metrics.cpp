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

#include "elec/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <vector>

#include "elec/error.hpp"
#include "elec/losses.hpp"

namespace elec {

double auc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw UndefinedMetricError("auc: labels/scores size mismatch");
  const std::size_t n = labels.size();
  std::size_t n_pos = 0;
  for (auto y : labels) {
    if (y > 1) throw UndefinedMetricError("auc: labels must be 0 or 1");
    n_pos += y;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("auc: needs at least one positive and one negative");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based average ranks over positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]]) rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double logloss(std::span<const std::uint8_t> labels, std::span<const double> scores, double eps) {
  if (labels.empty()) throw UndefinedMetricError("logloss: empty input");
  if (labels.size() != scores.size()) throw UndefinedMetricError("logloss: labels/scores size mismatch");
  return bce_loss(scores, labels, eps);
}

EvalReport evaluate(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  EvalReport r;
  for (auto y : labels) (y ? r.n_pos : r.n_neg)++;
  r.auc = auc(labels, scores);
  r.logloss = logloss(labels, scores);
  return r;
}

namespace {
std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
}  // namespace

std::string format_report(const EvalReport& r) {
  std::string s;
  if (!r.model.empty()) s += "model: " + r.model + "\n";
  if (!r.split.empty()) s += "split: " + r.split + "\n";
  s += "auc: " + fmt("%.4f", r.auc) + "\n";
  s += "logloss: " + fmt("%.4f", r.logloss) + "\n";
  s += "n_pos: " + std::to_string(r.n_pos) + "\n";
  s += "n_neg: " + std::to_string(r.n_neg) + "\n";
  if (r.latency) {
    s += "latency_mean_s: " + fmt("%.9f", r.latency->mean) + "\n";
    s += "latency_p50_s: " + fmt("%.9f", r.latency->p50) + "\n";
    s += "latency_p99_s: " + fmt("%.9f", r.latency->p99) + "\n";
    s += "store_reads_per_repetition: " + std::to_string(r.latency->store_reads_per_repetition) + "\n";
  }
  return s;
}

std::string format_report_line(const EvalReport& r) {
  std::string s = "model=" + (r.model.empty() ? std::string("-") : r.model);
  s += " split=" + (r.split.empty() ? std::string("-") : r.split);
  s += " auc=" + fmt("%.4f", r.auc);
  s += " logloss=" + fmt("%.4f", r.logloss);
  s += " n_pos=" + std::to_string(r.n_pos);
  s += " n_neg=" + std::to_string(r.n_neg);
  return s;
}

}  // namespace elec
