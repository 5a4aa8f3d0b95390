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

#include "elec/synthetic.hpp"

#include <array>
#include <numeric>

#include "elec/nn.hpp"
#include "elec/rng.hpp"

namespace elec {

namespace {

constexpr std::size_t kHours = 24;
constexpr std::size_t kDevices = 4;
constexpr std::size_t kRegions = 50;
constexpr std::size_t kFactorDim = 4;
constexpr std::array<const char*, 3> kGrades = {"low", "medium", "high"};
constexpr std::array<const char*, 4> kDeviceNames = {"phone", "tablet", "desktop", "tv"};

std::vector<double> draw(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace

FieldSchema synthetic_schema(const SyntheticConfig& config) {
  auto cap = [](std::size_t n) { return static_cast<std::uint32_t>(4 * n); };
  return {
      {"user", FieldKind::categorical, cap(config.users)},
      {"item", FieldKind::categorical, cap(config.items)},
      {"category", FieldKind::categorical, cap(config.categories)},
      {"hour", FieldKind::categorical, cap(kHours)},
      {"device", FieldKind::categorical, cap(kDevices)},
      {"region", FieldKind::categorical, cap(kRegions)},
      {"extra_text", FieldKind::text, 1},
  };
}

SyntheticData make_synthetic(const SyntheticConfig& c) {
  Rng rng(c.seed);
  // World.
  const auto user_eff = draw(rng, c.users, c.field_scale);
  const auto item_eff = draw(rng, c.items, c.field_scale);
  const auto cat_eff = draw(rng, c.categories, c.field_scale);
  const auto hour_eff = draw(rng, kHours, c.field_scale);
  const auto dev_eff = draw(rng, kDevices, c.field_scale);
  const auto region_eff = draw(rng, kRegions, c.field_scale);
  const auto user_vec = draw(rng, c.users * kFactorDim, c.interaction_scale);
  const auto cat_vec = draw(rng, c.categories * kFactorDim, c.interaction_scale);
  const auto mood_eff = draw(rng, c.moods, c.mood_scale);
  std::vector<std::size_t> item_cat(c.items);
  std::vector<int> item_grade(c.items);
  for (std::size_t i = 0; i < c.items; ++i) {
    item_cat[i] = static_cast<std::size_t>(rng.below(c.categories));
    item_grade[i] = static_cast<int>(rng.below(3));
  }

  SyntheticData out;
  out.full.schema = synthetic_schema(c);
  const std::size_t total = c.n_train + c.n_val + c.n_test;
  out.full.samples.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    const auto user = static_cast<std::size_t>(rng.below(c.users));
    const auto item = static_cast<std::size_t>(rng.below(c.items));
    const std::size_t cat = item_cat[item];
    const auto hour = static_cast<std::size_t>(rng.below(kHours));
    const auto dev = static_cast<std::size_t>(rng.below(kDevices));
    const auto region = static_cast<std::size_t>(rng.below(kRegions));
    const auto mood = static_cast<std::size_t>(rng.below(c.moods));
    const int grade = item_grade[item];

    double logit = c.bias + user_eff[user] + item_eff[item] + cat_eff[cat] + hour_eff[hour] + dev_eff[dev] +
                   region_eff[region];
    for (std::size_t f = 0; f < kFactorDim; ++f) {
      logit += user_vec[user * kFactorDim + f] * cat_vec[cat * kFactorDim + f];
    }
    logit += c.quality_weight * static_cast<double>(grade - 1);
    logit += mood_eff[mood];

    Sample s;
    s.id = k;
    s.key = k;
    s.raw = {"u" + std::to_string(user), "i" + std::to_string(item),       "c" + std::to_string(cat),
             "h" + std::to_string(hour), kDeviceNames[dev],                "r" + std::to_string(region)};
    std::size_t f = 0;
    for (const auto& spec : out.full.schema) {
      if (spec.kind != FieldKind::categorical) continue;
      s.features.push_back(encode_feature(s.raw[f], spec.vocab_capacity));
      ++f;
    }
    s.extra_text = std::string("Quality is ") + kGrades[static_cast<std::size_t>(grade)] + ". Mood is m" +
                   std::to_string(mood) + ".";
    s.label = rng.uniform() < sigmoid(logit) ? 1 : 0;
    out.full.samples.push_back(std::move(s));
  }

  auto range = [](std::size_t b, std::size_t e) {
    std::vector<std::size_t> v(e - b);
    std::iota(v.begin(), v.end(), b);
    return v;
  };
  out.train = subset(out.full, range(0, c.n_train));
  out.val = subset(out.full, range(c.n_train, c.n_train + c.n_val));
  out.test = subset(out.full, range(c.n_train + c.n_val, total));
  return out;
}

}  // namespace elec
