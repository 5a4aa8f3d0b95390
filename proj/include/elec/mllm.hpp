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

// The adapted language model: a frozen, precomputed text-embedding store
// followed by a trainable transformation MLP and a sigmoid prediction layer.
//
// Store file layout (little-endian):
//   magic   "ELEC"
//   version u32 = 1
//   count   u64
//   dim     u32
//   rows    count x dim IEEE-754 binary32, row k = sample key k

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elec/checkpoint.hpp"
#include "elec/data.hpp"
#include "elec/nn.hpp"

namespace elec {

inline constexpr char kStoreMagic[4] = {'E', 'L', 'E', 'C'};
inline constexpr std::uint32_t kStoreVersion = 1;

class TextEmbeddingStore {
 public:
  TextEmbeddingStore() = default;
  /// `rows` holds count x dim values; each is narrowed to binary32 so the
  /// in-memory store matches what a save/load cycle yields.
  TextEmbeddingStore(std::size_t dim, std::span<const double> rows);

  TextEmbeddingStore(const TextEmbeddingStore& other);
  TextEmbeddingStore& operator=(const TextEmbeddingStore& other);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }

  /// Row for a sample key; each call counts as one store access.
  std::span<const double> row(std::uint64_t key) const;

  std::uint64_t reads() const { return reads_.load(std::memory_order_relaxed); }
  void reset_reads() const { reads_.store(0, std::memory_order_relaxed); }

  /// Throws BindingError when any sample key has no row.
  void check_covers(const Dataset& dataset) const;

  /// Raw row-major values, no access counting.
  std::span<const double> values() const { return rows_; }

  void save(const std::filesystem::path& path) const;
  static TextEmbeddingStore load(const std::filesystem::path& path);

 private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> rows_;
  mutable std::atomic<std::uint64_t> reads_{0};
};

/// Signed feature hashing of whitespace tokens: each token adds +-1 at
/// stable_hash(token, seed) mod dim, the sign drawn from a second hash under
/// a salted seed. The sum is L2-normalized unless it is all zero.
std::vector<double> hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

/// Hash-embeds every sample's textualized form, one row per sample key.
TextEmbeddingStore build_hash_store(const Dataset& dataset, std::size_t dim, std::uint64_t seed);

/// [keys.size() x dim] rows gathered from the store (counted accesses).
Matrix gather_rows(const TextEmbeddingStore& store, std::span<const std::uint64_t> keys);

struct MllmConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> dims{512, 256, 128};

  std::size_t rep_dim() const { return dims.back(); }
};

struct MllmOutput {
  Matrix rep;             // [N x rep_dim]
  std::vector<double> p;  // [N]
};

class MllmAdapter {
 public:
  struct Trace {
    Mlp::Trace transform;
    Matrix p;
  };

  MllmAdapter() = default;
  explicit MllmAdapter(MllmConfig config);

  void init(Rng& rng);

  const MllmConfig& config() const { return config_; }
  std::size_t rep_dim() const { return config_.rep_dim(); }

  MllmOutput forward(const Matrix& embeddings, Trace* trace = nullptr) const;

  /// Backpropagates dL/dp into transformation and prediction parameters.
  void backward(const Trace& trace, std::span<const double> dp);

  void set_frozen(bool frozen);
  std::vector<Parameter*> params();

  Checkpoint to_checkpoint() const;
  static MllmAdapter from_checkpoint(const Checkpoint& ckpt);

 private:
  MllmConfig config_;
  Mlp transform_;
  DenseLayer prediction_;
};

struct MllmTrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 256;
  AdamConfig adam{};
  std::uint64_t init_seed = 1;
  std::uint64_t shuffle_seed = 2;
  double prob_eps = 1e-7;
};

struct MllmTrainResult {
  MllmAdapter adapter;
  std::vector<double> epoch_loss;  // mean batch BCE per epoch
};

/// Stage 1: fits transformation + prediction on BCE; the store is only read.
MllmTrainResult train_mllm(const Dataset& train, const TextEmbeddingStore& store, const MllmConfig& config,
                           const MllmTrainConfig& train_config);

/// Adapter click probabilities for every sample of `dataset`.
std::vector<double> mllm_predict(const MllmAdapter& adapter, const TextEmbeddingStore& store,
                                 const Dataset& dataset, std::size_t batch_size = 1024);

}  // namespace elec
