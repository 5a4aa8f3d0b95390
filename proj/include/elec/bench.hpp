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

// Per-sample inference latency. Every sample of the batch is scored alone
// (batch size 1); one warm-up pass precedes the timed repetitions.

#include "elec/metrics.hpp"
#include "elec/siamese.hpp"

namespace elec {

/// `observed` is a store whose access counter is sampled around each
/// repetition; pass the process's store (if any) to show the vanilla path
/// never reads it.
LatencyStats bench_inference(const VanillaNetwork& net, const TabularBatch& batch, std::size_t repetitions,
                             const TextEmbeddingStore* observed = nullptr);

/// Gain path with live adapter representations; reads `store` once per
/// sample.
LatencyStats bench_inference(const GainNetwork& net, const TabularBatch& batch, const TextEmbeddingStore& store,
                             const MllmAdapter& adapter, std::size_t repetitions);

/// Row `row` of `batch` as a one-sample batch.
TabularBatch single_row(const TabularBatch& batch, std::size_t row);

}  // namespace elec
