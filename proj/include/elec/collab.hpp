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

// Collaborative tabular models: per-field embeddings, an optional stack of
// full-matrix cross layers, then a relu MLP whose last output is the
// branch representation h.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elec/data.hpp"
#include "elec/nn.hpp"

namespace elec {

enum class CollabVariant { dnn, dcnv2 };

std::string_view variant_name(CollabVariant v);
CollabVariant parse_variant(std::string_view s);

struct CollabConfig {
  std::size_t embedding_dim = 32;
  std::vector<std::size_t> deep_dims{256, 128, 64};
  std::size_t cross_layers = 2;
  CollabVariant variant = CollabVariant::dcnv2;

  /// Throws ConfigError.
  void validate() const;
  std::size_t rep_dim() const { return deep_dims.back(); }
};

/// x0 * (W xl + b) + xl for single vectors (elementwise product).
std::vector<double> cross_layer(std::span<const double> x0, std::span<const double> xl,
                                const Matrix& weight, std::span<const double> bias);

/// Batched cross layer. Wraps an identity dense layer for W xl + b.
class CrossLayer {
 public:
  CrossLayer() = default;
  CrossLayer(const std::string& name, std::size_t width);

  void init(Rng& rng) { linear_.init(rng); }
  std::size_t width() const { return linear_.in_dim(); }

  /// Returns x_{l+1}; stores W xl + b in `u`.
  Matrix forward(const Matrix& x0, const Matrix& xl, Matrix& u) const;

  /// Accumulates weight/bias grads. Adds dL/dx0 into `dx0` and returns dL/dxl.
  Matrix backward(const Matrix& x0, const Matrix& xl, const Matrix& u, const Matrix& dout, Matrix& dx0);

  DenseLayer& linear() { return linear_; }
  const DenseLayer& linear() const { return linear_; }

 private:
  DenseLayer linear_;
};

struct CollabOutput {
  Matrix h;               // [N x rep_dim]
  std::vector<double> p;  // [N]
};

class CollabModel {
 public:
  struct Trace {
    Matrix x0;
    std::vector<Matrix> cross_in;  // xl fed to each cross layer
    std::vector<Matrix> cross_u;
    Mlp::Trace deep;
  };

  CollabModel() = default;
  /// `vocab` holds one capacity per categorical field. Parameter names are
  /// prefixed with `prefix`. Without a head, forward() is unavailable and the
  /// model only produces representations.
  CollabModel(std::vector<std::uint32_t> vocab, CollabConfig config, const std::string& prefix,
              bool with_head = true);

  void init(Rng& rng);

  const CollabConfig& config() const { return config_; }
  const std::vector<std::uint32_t>& vocab() const { return vocab_; }
  std::size_t fields() const { return vocab_.size(); }
  std::size_t input_width() const { return vocab_.size() * config_.embedding_dim; }
  std::size_t rep_dim() const { return config_.rep_dim(); }
  bool has_head() const { return has_head_; }

  /// h for every row. Fills `trace` when non-null.
  Matrix represent(const TabularBatch& batch, Trace* trace = nullptr) const;

  /// Backpropagates dL/dh into every tower parameter.
  void represent_backward(const TabularBatch& batch, const Trace& trace, const Matrix& dh);

  /// (h, sigmoid(head(h))). Requires a head.
  CollabOutput forward(const TabularBatch& batch) const;

  DenseLayer& head();
  const DenseLayer& head() const;

  std::vector<EmbeddingTable>& embeddings() { return embeddings_; }
  std::vector<CrossLayer>& cross() { return cross_; }
  Mlp& deep() { return deep_; }

  /// Tower parameters, then the head's when present.
  std::vector<Parameter*> params();

 private:
  std::vector<std::uint32_t> vocab_;
  CollabConfig config_;
  bool has_head_ = true;
  std::vector<EmbeddingTable> embeddings_;
  std::vector<CrossLayer> cross_;
  Mlp deep_;
  DenseLayer head_;
};

std::vector<std::uint32_t> vocab_of(const FieldSchema& schema);

/// Checkpoint metadata round trip for a collab config and its vocab.
void put_collab_meta(std::map<std::string, std::string>& meta, const CollabConfig& config,
                     const std::vector<std::uint32_t>& vocab);
CollabConfig collab_config_from_meta(const std::map<std::string, std::string>& meta);
std::vector<std::uint32_t> vocab_from_meta(const std::map<std::string, std::string>& meta);

std::string join_sizes(const std::vector<std::size_t>& v);
std::vector<std::size_t> parse_sizes(std::string_view s);

}  // namespace elec
