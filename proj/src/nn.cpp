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

#include "elec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "elec/error.hpp"
#include "elec/kernels.hpp"

namespace elec {

Matrix hconcat(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw DimensionError("hconcat: row count mismatch");
  Matrix out(a.rows, a.cols + b.cols);
  for (std::size_t r = 0; r < a.rows; ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(a.cols));
  }
  return out;
}

Parameter::Parameter(std::string n, std::vector<std::size_t> s) : name(std::move(n)), shape(std::move(s)) {
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  values.assign(count, 0.0);
  grad.assign(count, 0.0);
}

void Parameter::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void glorot_uniform(Parameter& p, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : p.values) v = rng.uniform(-limit, limit);
}

double sigmoid(double x) {
  static constexpr double kLo = std::numeric_limits<double>::denorm_min();
  static const double kHi = std::nextafter(1.0, 0.0);
  double s;
  if (x >= 0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kLo, kHi);
}

// ---------------------------------------------------------------------------

DenseLayer::DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act)
    : in_(in), out_(out), act_(act), weight_(name + ".weight", {out, in}), bias_(name + ".bias", {out}) {
  if (in == 0 || out == 0) throw DimensionError("dense layer '" + name + "': zero dimension");
}

void DenseLayer::init(Rng& rng) {
  glorot_uniform(weight_, in_, out_, rng);
  std::fill(bias_.values.begin(), bias_.values.end(), 0.0);
}

Matrix DenseLayer::forward(const Matrix& x) const {
  if (x.cols != in_) {
    throw DimensionError("dense '" + weight_.name + "': input width " + std::to_string(x.cols) +
                         " != " + std::to_string(in_));
  }
  const auto& k = kernels::active();
  Matrix y(x.rows, out_);
  for (std::size_t r = 0; r < x.rows; ++r) {
    double* yr = y.row(r).data();
    k.dot_rows(x.row(r).data(), weight_.values.data(), in_, out_, in_, yr);
    for (std::size_t o = 0; o < out_; ++o) {
      const double z = yr[o] + bias_.values[o];
      switch (act_) {
        case Activation::identity: yr[o] = z; break;
        case Activation::relu: yr[o] = z > 0.0 ? z : 0.0; break;
        case Activation::sigmoid: yr[o] = sigmoid(z); break;
      }
    }
  }
  return y;
}

Matrix DenseLayer::backward(const Matrix& x, const Matrix& y, const Matrix& dy, bool want_dx) {
  if (x.cols != in_ || y.cols != out_ || dy.cols != out_ || x.rows != dy.rows || y.rows != dy.rows) {
    throw DimensionError("dense '" + weight_.name + "': backward shape mismatch");
  }
  const auto& k = kernels::active();
  Matrix dz = dy;
  for (std::size_t i = 0; i < dz.data.size(); ++i) {
    switch (act_) {
      case Activation::identity: break;
      case Activation::relu: if (y.data[i] <= 0.0) dz.data[i] = 0.0; break;
      case Activation::sigmoid: dz.data[i] *= y.data[i] * (1.0 - y.data[i]); break;
    }
  }
  Matrix dx;
  if (want_dx) dx = Matrix(x.rows, in_);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* xr = x.row(r).data();
    const double* dzr = dz.row(r).data();
    for (std::size_t o = 0; o < out_; ++o) {
      const double g = dzr[o];
      if (g == 0.0) continue;
      bias_.grad[o] += g;
      k.axpy(g, xr, weight_.grad.data() + o * in_, in_);
      if (want_dx) k.axpy(g, weight_.values.data() + o * in_, dx.row(r).data(), in_);
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------

Mlp::Mlp(const std::string& name, std::size_t in, const std::vector<std::size_t>& dims,
         Activation hidden, Activation last) {
  if (dims.empty()) throw DimensionError("mlp '" + name + "': no layers");
  std::size_t prev = in;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const Activation act = i + 1 == dims.size() ? last : hidden;
    layers_.emplace_back(name + "." + std::to_string(i), prev, dims[i], act);
    prev = dims[i];
  }
}

void Mlp::init(Rng& rng) {
  for (auto& l : layers_) l.init(rng);
}

std::size_t Mlp::in_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
std::size_t Mlp::out_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }

Mlp::Trace Mlp::forward(Matrix x) const {
  Trace t;
  t.acts.reserve(layers_.size() + 1);
  t.acts.push_back(std::move(x));
  for (const auto& l : layers_) t.acts.push_back(l.forward(t.acts.back()));
  return t;
}

Matrix Mlp::backward(const Trace& trace, Matrix dy, bool want_dx) {
  for (std::size_t i = layers_.size(); i-- > 0;) {
    dy = layers_[i].backward(trace.acts[i], trace.acts[i + 1], dy, want_dx || i > 0);
  }
  return dy;
}

std::vector<Parameter*> Mlp::params() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weight());
    out.push_back(&l.bias());
  }
  return out;
}

// ---------------------------------------------------------------------------

EmbeddingTable::EmbeddingTable(std::string name, std::size_t vocab, std::size_t dim)
    : vocab_(vocab), dim_(dim), table_(std::move(name), {vocab, dim}) {
  if (vocab == 0 || dim == 0) throw DimensionError("embedding: zero dimension");
}

void EmbeddingTable::init(Rng& rng) { glorot_uniform(table_, vocab_, dim_, rng); }

std::span<const double> EmbeddingTable::row(std::uint32_t id) const {
  if (id >= vocab_) {
    throw IndexError("embedding '" + table_.name + "': id " + std::to_string(id) + " >= vocab " +
                     std::to_string(vocab_));
  }
  return {table_.values.data() + static_cast<std::size_t>(id) * dim_, dim_};
}

Matrix EmbeddingTable::lookup(std::span<const std::uint32_t> ids) const {
  Matrix out(ids.size(), dim_);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto src = row(ids[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

void EmbeddingTable::scatter_grad_row(std::uint32_t id, std::span<const double> dy) {
  if (id >= vocab_) throw IndexError("embedding '" + table_.name + "': id out of range");
  if (dy.size() != dim_) throw DimensionError("embedding: grad width mismatch");
  kernels::active().axpy(1.0, dy.data(), table_.grad.data() + static_cast<std::size_t>(id) * dim_, dim_);
}

void EmbeddingTable::scatter_grad(std::span<const std::uint32_t> ids, const Matrix& dy) {
  if (dy.rows != ids.size() || dy.cols != dim_) throw DimensionError("embedding: grad shape mismatch");
  for (std::size_t k = 0; k < ids.size(); ++k) scatter_grad_row(ids[k], dy.row(k));
}

// ---------------------------------------------------------------------------

std::vector<double> average_pool(std::span<const std::vector<double>> vectors) {
  if (vectors.empty()) throw DomainError("average_pool: empty input");
  const std::size_t d = vectors.front().size();
  std::vector<double> out(d, 0.0);
  for (const auto& v : vectors) {
    if (v.size() != d) throw DimensionError("average_pool: unequal lengths");
    for (std::size_t i = 0; i < d; ++i) out[i] += v[i];
  }
  const double inv = static_cast<double>(vectors.size());
  for (double& x : out) x /= inv;
  return out;
}

// ---------------------------------------------------------------------------

Adam::Adam(std::vector<Parameter*> params, AdamConfig config)
    : config_(config), params_(std::move(params)) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    if (!p.frozen) {
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double g = p.grad[i];
        m[i] = b1 * m[i] + (1.0 - b1) * g;
        v[i] = b2 * v[i] + (1.0 - b2) * g * g;
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        p.values[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.epsilon);
      }
    }
    p.zero_grad();
  }
}

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) p->zero_grad();
}

// ---------------------------------------------------------------------------

GradCheckResult grad_check(std::span<Parameter* const> params,
                           const std::function<double()>& loss,
                           const std::function<void()>& backward,
                           const GradCheckOptions& options) {
  zero_grads(params);
  backward();
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const Parameter* p : params) analytic.push_back(p->grad);
  zero_grads(params);

  GradCheckResult res;
  Rng rng(options.seed);
  const double h = options.step;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    std::vector<std::size_t> coords;
    if (options.max_coords_per_param == 0 || p.size() <= options.max_coords_per_param) {
      coords.resize(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) coords[i] = i;
    } else {
      for (std::size_t c = 0; c < options.max_coords_per_param; ++c) {
        coords.push_back(static_cast<std::size_t>(rng.below(p.size())));
      }
    }
    for (std::size_t i : coords) {
      const double saved = p.values[i];
      p.values[i] = saved + h;
      const double up = loss();
      p.values[i] = saved - h;
      const double down = loss();
      p.values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double err = std::abs(a - numeric) / denom;
      ++res.checked;
      if (err > res.max_rel_error || res.worst_param.empty()) {
        if (err >= res.max_rel_error) {
          res.max_rel_error = err;
          res.worst_param = p.name;
          res.worst_index = i;
          res.analytic = a;
          res.numeric = numeric;
        }
      }
    }
  }
  return res;
}

}  // namespace elec
