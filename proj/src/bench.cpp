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

#include "elec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "elec/error.hpp"

namespace elec {

TabularBatch single_row(const TabularBatch& batch, std::size_t row) {
  if (row >= batch.n) throw IndexError("single_row: row out of range");
  TabularBatch one;
  one.n = 1;
  one.fields = batch.fields;
  one.ids.assign(batch.ids.begin() + static_cast<std::ptrdiff_t>(row * batch.fields),
                 batch.ids.begin() + static_cast<std::ptrdiff_t>((row + 1) * batch.fields));
  one.keys = {batch.keys[row]};
  return one;
}

namespace {

template <typename Score>
LatencyStats run(const TabularBatch& batch, std::size_t repetitions, const TextEmbeddingStore* observed,
                 Score&& score) {
  if (repetitions < 1) throw ConfigError("bench: repetitions must be >= 1");
  std::vector<TabularBatch> rows;
  rows.reserve(batch.n);
  for (std::size_t r = 0; r < batch.n; ++r) rows.push_back(single_row(batch, r));

  volatile double sink = 0.0;
  for (const auto& one : rows) sink = sink + score(one);  // warm-up

  LatencyStats st;
  st.repetitions = repetitions;
  st.samples_per_repetition = batch.n;
  std::vector<double> times;
  times.reserve(repetitions * batch.n);
  std::uint64_t reads_first = 0;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const std::uint64_t before = observed ? observed->reads() : 0;
    for (const auto& one : rows) {
      const auto t0 = std::chrono::steady_clock::now();
      sink = sink + score(one);
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    const std::uint64_t reads = observed ? observed->reads() - before : 0;
    if (rep == 0) {
      reads_first = reads;
    } else if (reads != reads_first) {
      throw DomainError("bench: store reads differ between repetitions");
    }
  }
  st.store_reads_per_repetition = reads_first;
  if (!times.empty()) {
    double sum = 0.0;
    for (double t : times) sum += t;
    st.mean = sum / static_cast<double>(times.size());
    std::sort(times.begin(), times.end());
    auto pct = [&](double q) {
      const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(times.size()))) - 1;
      return times[std::min(idx, times.size() - 1)];
    };
    st.p50 = pct(0.50);
    st.p99 = pct(0.99);
  }
  return st;
}

}  // namespace

LatencyStats bench_inference(const VanillaNetwork& net, const TabularBatch& batch, std::size_t repetitions,
                             const TextEmbeddingStore* observed) {
  return run(batch, repetitions, observed, [&](const TabularBatch& one) { return infer_vanilla(net, one)[0]; });
}

LatencyStats bench_inference(const GainNetwork& net, const TabularBatch& batch, const TextEmbeddingStore& store,
                             const MllmAdapter& adapter, std::size_t repetitions) {
  const LiveRepresentations live(store, adapter);
  return run(batch, repetitions, &store, [&](const TabularBatch& one) { return net.forward(one, live).p[0]; });
}

}  // namespace elec
