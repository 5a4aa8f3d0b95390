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

// Minimal deterministic network substrate: dense, embedding and pooling
// primitives with hand-written backward passes, Adam, and a central
// finite-difference gradient checker. Everything is float64; reductions over
// a batch always run in row order so results are reproducible bit for bit.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "elec/rng.hpp"

namespace elec {

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Concatenates columns: [a | b]. Row counts must match.
Matrix hconcat(const Matrix& a, const Matrix& b);

struct Parameter {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool frozen = false;

  Parameter() = default;
  Parameter(std::string n, std::vector<std::size_t> s);

  std::size_t size() const { return values.size(); }
  void zero_grad();
};

/// Glorot-uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Parameter& p, std::size_t fan_in, std::size_t fan_out, Rng& rng);

enum class Activation { identity, relu, sigmoid };

/// Logistic function, clamped so the result stays strictly inside (0, 1)
/// even where the exact value rounds to 0 or 1.
double sigmoid(double x);

class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act);

  void init(Rng& rng);

  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  Activation activation() const { return act_; }

  /// activation(x W^T + b) per row.
  Matrix forward(const Matrix& x) const;

  /// `y` is the output forward() produced for `x`; `dy` is dL/dy. Adds into
  /// weight/bias grads and returns dL/dx (empty when `want_dx` is false).
  Matrix backward(const Matrix& x, const Matrix& y, const Matrix& dy, bool want_dx = true);

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  const Parameter& weight() const { return weight_; }
  const Parameter& bias() const { return bias_; }

  std::vector<Parameter*> params() { return {&weight_, &bias_}; }

 private:
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  Activation act_ = Activation::identity;
  Parameter weight_;  // [out x in]
  Parameter bias_;    // [out]
};

/// Stack of dense layers. Hidden layers use `hidden`, the last uses `last`.
class Mlp {
 public:
  struct Trace {
    std::vector<Matrix> acts;  // acts[0] = input, acts[i + 1] = output of layer i
    const Matrix& output() const { return acts.back(); }
  };

  Mlp() = default;
  Mlp(const std::string& name, std::size_t in, const std::vector<std::size_t>& dims,
      Activation hidden, Activation last);

  void init(Rng& rng);

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t depth() const { return layers_.size(); }

  Trace forward(Matrix x) const;
  Matrix backward(const Trace& trace, Matrix dy, bool want_dx = true);

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<Parameter*> params();

 private:
  std::vector<DenseLayer> layers_;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::string name, std::size_t vocab, std::size_t dim);

  void init(Rng& rng);

  std::size_t vocab() const { return vocab_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> row(std::uint32_t id) const;

  /// Row gather. Throws IndexError for id >= vocab.
  Matrix lookup(std::span<const std::uint32_t> ids) const;

  /// Adds dy row k into the grad row of ids[k], in k order.
  void scatter_grad(std::span<const std::uint32_t> ids, const Matrix& dy);
  void scatter_grad_row(std::uint32_t id, std::span<const double> dy);

  Parameter& table() { return table_; }
  const Parameter& table() const { return table_; }

 private:
  std::size_t vocab_ = 0;
  std::size_t dim_ = 0;
  Parameter table_;
};

/// Elementwise mean of equal-length vectors. Throws DomainError when empty.
std::vector<double> average_pool(std::span<const std::vector<double>> vectors);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig config = {});

  /// One bias-corrected update of every non-frozen parameter, then zeroes
  /// all gradients (frozen ones included).
  void step();

  std::uint64_t t() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Parameter*> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t t_ = 0;
};

void zero_grads(std::span<Parameter* const> params);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Denominator floor: |a - n| / max(|a|, |n|, floor).
  double floor = 1e-4;
  // Check at most this many coordinates per parameter (0 = all), chosen by a
  // seeded draw.
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 0;
};

/// Central finite differences against analytic gradients. `backward` must
/// leave dLoss/dtheta in each Parameter::grad (grads are zeroed first).
GradCheckResult grad_check(std::span<Parameter* const> params,
                           const std::function<double()>& loss,
                           const std::function<void()>& backward,
                           const GradCheckOptions& options = {});

}  // namespace elec
