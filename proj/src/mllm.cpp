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

#include "elec/mllm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "elec/binio.hpp"
#include "elec/collab.hpp"
#include "elec/error.hpp"
#include "elec/hash.hpp"
#include "elec/losses.hpp"
#include "elec/textualize.hpp"

namespace elec {

namespace {
constexpr std::uint64_t kSignSalt = 0x9e3779b97f4a7c15ULL;
}  // namespace

TextEmbeddingStore::TextEmbeddingStore(std::size_t dim, std::span<const double> rows) : dim_(dim) {
  if (dim == 0) throw DimensionError("embedding store: dim must be >= 1");
  if (rows.size() % dim != 0) throw DimensionError("embedding store: value count not a multiple of dim");
  count_ = rows.size() / dim;
  rows_.reserve(rows.size());
  for (double v : rows) rows_.push_back(static_cast<double>(static_cast<float>(v)));
}

TextEmbeddingStore::TextEmbeddingStore(const TextEmbeddingStore& other)
    : dim_(other.dim_), count_(other.count_), rows_(other.rows_) {}

TextEmbeddingStore& TextEmbeddingStore::operator=(const TextEmbeddingStore& other) {
  dim_ = other.dim_;
  count_ = other.count_;
  rows_ = other.rows_;
  reads_.store(0, std::memory_order_relaxed);
  return *this;
}

std::span<const double> TextEmbeddingStore::row(std::uint64_t key) const {
  if (key >= count_) {
    throw BindingError("embedding store has no row for sample " + std::to_string(key) + " (count " +
                       std::to_string(count_) + ")");
  }
  reads_.fetch_add(1, std::memory_order_relaxed);
  return {rows_.data() + key * dim_, dim_};
}

void TextEmbeddingStore::check_covers(const Dataset& dataset) const {
  for (const auto& s : dataset.samples) {
    if (s.key >= count_) {
      throw BindingError("embedding store (count " + std::to_string(count_) + ") does not cover sample key " +
                         std::to_string(s.key));
    }
  }
}

void TextEmbeddingStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write embedding store '" + path.string() + "'");
  out.write(kStoreMagic, 4);
  binio::put_uint<std::uint32_t>(out, kStoreVersion);
  binio::put_uint<std::uint64_t>(out, count_);
  binio::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
  for (double v : rows_) binio::put_f32(out, static_cast<float>(v));
  out.flush();
  if (!out) throw IoError("write failed for embedding store '" + path.string() + "'");
}

TextEmbeddingStore TextEmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding store '" + path.string() + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kStoreMagic, 4) != 0) {
    throw FormatError("'" + path.string() + "' is not an embedding store (bad magic)");
  }
  const auto version = binio::get_uint<std::uint32_t>(in, "store version");
  if (version != kStoreVersion) {
    throw FormatError("embedding store version " + std::to_string(version) + " is not supported");
  }
  const auto count = binio::get_uint<std::uint64_t>(in, "store count");
  const auto dim = binio::get_uint<std::uint32_t>(in, "store dim");
  if (dim == 0) throw FormatError("embedding store dim is 0");

  // Size check before allocating.
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  in.seekg(here);
  const std::uint64_t need = count * dim * 4;
  if (count != 0 && (need / count / 4 != dim || static_cast<std::uint64_t>(end - here) < need)) {
    throw CorruptionError("embedding store '" + path.string() + "' is truncated: header promises " +
                          std::to_string(count) + " x " + std::to_string(dim) + " values");
  }
  std::vector<char> bytes(need);
  if (need > 0 && !in.read(bytes.data(), static_cast<std::streamsize>(need))) {
    throw CorruptionError("embedding store '" + path.string() + "' is truncated");
  }
  TextEmbeddingStore s;
  s.dim_ = dim;
  s.count_ = count;
  s.rows_.resize(count * dim);
  for (std::size_t i = 0; i < s.rows_.size(); ++i) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
    s.rows_[i] = static_cast<double>(std::bit_cast<float>(u));
  }
  return s;
}

std::vector<double> hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw DimensionError("hash_embed: dim must be >= 1");
  std::vector<double> v(dim, 0.0);
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i == b) break;
    const std::string_view tok = text.substr(b, i - b);
    const std::uint64_t slot = stable_hash(tok, seed) % dim;
    const bool negative = (stable_hash(tok, seed ^ kSignSalt) >> 63) != 0;
    v[slot] += negative ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

TextEmbeddingStore build_hash_store(const Dataset& dataset, std::size_t dim, std::uint64_t seed) {
  std::uint64_t count = 0;
  for (const auto& s : dataset.samples) count = std::max(count, s.key + 1);
  std::vector<double> rows(count * dim, 0.0);
  for (const auto& s : dataset.samples) {
    const auto v = hash_embed(textualize_sample(s, dataset.schema).full(), dim, seed);
    std::copy(v.begin(), v.end(), rows.begin() + static_cast<std::ptrdiff_t>(s.key * dim));
  }
  return TextEmbeddingStore(dim, rows);
}

Matrix gather_rows(const TextEmbeddingStore& store, std::span<const std::uint64_t> keys) {
  Matrix out(keys.size(), store.dim());
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto r = store.row(keys[k]);
    std::copy(r.begin(), r.end(), out.row(k).begin());
  }
  return out;
}

// ---------------------------------------------------------------------------

MllmAdapter::MllmAdapter(MllmConfig config) : config_(std::move(config)) {
  if (config_.input_dim == 0) throw ConfigError("adapter: input_dim must be >= 1");
  if (config_.dims.empty()) throw ConfigError("adapter: transformation dims must be nonempty");
  transform_ = Mlp("adapter.transform", config_.input_dim, config_.dims, Activation::relu, Activation::identity);
  prediction_ = DenseLayer("adapter.prediction", config_.rep_dim(), 1, Activation::sigmoid);
}

void MllmAdapter::init(Rng& rng) {
  transform_.init(rng);
  prediction_.init(rng);
}

MllmOutput MllmAdapter::forward(const Matrix& embeddings, Trace* trace) const {
  if (embeddings.cols != config_.input_dim) {
    throw DimensionError("adapter: embedding width " + std::to_string(embeddings.cols) + " != " +
                         std::to_string(config_.input_dim));
  }
  Trace local;
  Trace& t = trace ? *trace : local;
  t.transform = transform_.forward(embeddings);
  t.p = prediction_.forward(t.transform.output());
  return MllmOutput{t.transform.output(), t.p.data};
}

void MllmAdapter::backward(const Trace& trace, std::span<const double> dp) {
  Matrix dy(dp.size(), 1);
  std::copy(dp.begin(), dp.end(), dy.data.begin());
  const Matrix drep = prediction_.backward(trace.transform.output(), trace.p, dy, true);
  transform_.backward(trace.transform, drep, false);
}

void MllmAdapter::set_frozen(bool frozen) {
  for (Parameter* p : params()) p->frozen = frozen;
}

std::vector<Parameter*> MllmAdapter::params() {
  auto out = transform_.params();
  out.push_back(&prediction_.weight());
  out.push_back(&prediction_.bias());
  return out;
}

Checkpoint MllmAdapter::to_checkpoint() const {
  Checkpoint c;
  c.tag = "adapter";
  c.meta["adapter.input_dim"] = std::to_string(config_.input_dim);
  c.meta["adapter.dims"] = join_sizes(config_.dims);
  auto ps = const_cast<MllmAdapter*>(this)->params();
  append_params(c, ps);
  return c;
}

MllmAdapter MllmAdapter::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.tag != "adapter") throw FormatError("expected an adapter checkpoint, got '" + ckpt.tag + "'");
  MllmConfig cfg;
  cfg.input_dim = parse_sizes(ckpt.meta_at("adapter.input_dim")).at(0);
  cfg.dims = parse_sizes(ckpt.meta_at("adapter.dims"));
  MllmAdapter a(cfg);
  auto ps = a.params();
  restore_params(ckpt, ps);
  return a;
}

// ---------------------------------------------------------------------------

MllmTrainResult train_mllm(const Dataset& train, const TextEmbeddingStore& store, const MllmConfig& config,
                           const MllmTrainConfig& tc) {
  if (store.dim() != config.input_dim) {
    throw BindingError("embedding store dim " + std::to_string(store.dim()) + " != adapter input_dim " +
                       std::to_string(config.input_dim));
  }
  store.check_covers(train);

  MllmTrainResult res{MllmAdapter(config), {}};
  Rng init_rng(tc.init_seed);
  res.adapter.init(init_rng);
  res.adapter.set_frozen(false);
  Adam opt(res.adapter.params(), tc.adam);

  for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
    double total = 0.0;
    std::size_t nb = 0;
    for (const Batch& b : batches(train, tc.batch_size, tc.shuffle_seed + epoch)) {
      const TabularBatch tb = gather(train, b);
      const Matrix e = gather_rows(store, tb.keys);
      MllmAdapter::Trace trace;
      const auto out = res.adapter.forward(e, &trace);
      const auto y = labels_of(train, b);
      std::vector<double> dp;
      total += bce_loss(out.p, y, tc.prob_eps, &dp);
      ++nb;
      res.adapter.backward(trace, dp);
      opt.step();
    }
    res.epoch_loss.push_back(nb ? total / static_cast<double>(nb) : 0.0);
  }
  return res;
}

std::vector<double> mllm_predict(const MllmAdapter& adapter, const TextEmbeddingStore& store,
                                 const Dataset& dataset, std::size_t batch_size) {
  std::vector<double> p;
  p.reserve(dataset.size());
  for (const Batch& b : batches(dataset, batch_size)) {
    const TabularBatch tb = gather(dataset, b);
    const auto out = adapter.forward(gather_rows(store, tb.keys));
    p.insert(p.end(), out.p.begin(), out.p.end());
  }
  return p;
}

}  // namespace elec
