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

// Seeded CTR generator with a text-only signal.
//
// Six categorical fields (user, item, category, hour, device, region) drive
// the click logit through per-value effects and a user x category
// interaction. Two further factors reach the label but no categorical
// column: an item-level quality grade and a per-impression context mood.
// Both are written only into the free-text column, so a tabular model can
// at best approximate quality through the item id and cannot see mood.

#include <cstdint>

#include "elec/data.hpp"

namespace elec {

struct SyntheticConfig {
  std::size_t n_train = 50000;
  std::size_t n_val = 5000;
  std::size_t n_test = 10000;
  std::uint64_t seed = 1;

  std::size_t users = 600;
  std::size_t items = 3000;
  std::size_t categories = 20;

  double field_scale = 0.35;        // std of per-value effects
  double interaction_scale = 0.45;  // std of user/category factors
  double quality_weight = 1.2;      // logit shift per quality grade step
  double mood_scale = 1.0;          // std of per-mood effects
  std::size_t moods = 8;
  double bias = -0.4;
};

struct SyntheticData {
  Dataset full;  // keys 0..M-1, train rows first, then val, then test
  Dataset train;
  Dataset val;
  Dataset test;
};

FieldSchema synthetic_schema(const SyntheticConfig& config = {});

SyntheticData make_synthetic(const SyntheticConfig& config);

}  // namespace elec
