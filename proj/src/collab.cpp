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

#include "elec/collab.hpp"

#include <algorithm>
#include <charconv>

#include "elec/error.hpp"
#include "elec/kernels.hpp"

namespace elec {

std::string_view variant_name(CollabVariant v) {
  return v == CollabVariant::dnn ? "dnn" : "dcnv2";
}

CollabVariant parse_variant(std::string_view s) {
  if (s == "dnn") return CollabVariant::dnn;
  if (s == "dcnv2") return CollabVariant::dcnv2;
  throw ConfigError("unknown collaborative variant '" + std::string(s) + "'");
}

void CollabConfig::validate() const {
  if (embedding_dim < 1) throw ConfigError("collab: embedding_dim must be >= 1");
  if (deep_dims.empty()) throw ConfigError("collab: deep_dims must be nonempty");
  if (std::find(deep_dims.begin(), deep_dims.end(), 0u) != deep_dims.end()) {
    throw ConfigError("collab: deep_dims entries must be >= 1");
  }
}

std::vector<double> cross_layer(std::span<const double> x0, std::span<const double> xl,
                                const Matrix& weight, std::span<const double> bias) {
  const std::size_t d = x0.size();
  if (xl.size() != d || weight.rows != d || weight.cols != d || bias.size() != d) {
    throw DimensionError("cross_layer: width mismatch");
  }
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    double u = bias[i];
    for (std::size_t j = 0; j < d; ++j) u += weight(i, j) * xl[j];
    out[i] = x0[i] * u + xl[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

CrossLayer::CrossLayer(const std::string& name, std::size_t width)
    : linear_(name, width, width, Activation::identity) {}

Matrix CrossLayer::forward(const Matrix& x0, const Matrix& xl, Matrix& u) const {
  if (x0.rows != xl.rows || x0.cols != xl.cols || x0.cols != width()) {
    throw DimensionError("cross layer: width mismatch");
  }
  u = linear_.forward(xl);
  Matrix out = xl;
  kernels::active().mul_acc(x0.data.data(), u.data.data(), out.data.data(), out.data.size());
  return out;
}

Matrix CrossLayer::backward(const Matrix& x0, const Matrix& xl, const Matrix& u, const Matrix& dout,
                            Matrix& dx0) {
  const auto& k = kernels::active();
  const std::size_t n = dout.data.size();
  Matrix du(dout.rows, dout.cols);
  k.mul_acc(dout.data.data(), x0.data.data(), du.data.data(), n);
  k.mul_acc(dout.data.data(), u.data.data(), dx0.data.data(), n);
  Matrix dxl = linear_.backward(xl, u, du, true);
  k.axpy(1.0, dout.data.data(), dxl.data.data(), n);
  return dxl;
}

// ---------------------------------------------------------------------------

CollabModel::CollabModel(std::vector<std::uint32_t> vocab, CollabConfig config, const std::string& prefix,
                         bool with_head)
    : vocab_(std::move(vocab)), config_(std::move(config)), has_head_(with_head) {
  config_.validate();
  if (vocab_.empty()) throw ConfigError("collab: at least one field is required");
  for (std::size_t f = 0; f < vocab_.size(); ++f) {
    embeddings_.emplace_back(prefix + ".emb." + std::to_string(f), vocab_[f], config_.embedding_dim);
  }
  const std::size_t width = input_width();
  if (config_.variant == CollabVariant::dcnv2) {
    for (std::size_t l = 0; l < config_.cross_layers; ++l) {
      cross_.emplace_back(prefix + ".cross." + std::to_string(l), width);
    }
  }
  deep_ = Mlp(prefix + ".deep", width, config_.deep_dims, Activation::relu, Activation::relu);
  if (has_head_) head_ = DenseLayer(prefix + ".head", rep_dim(), 1, Activation::sigmoid);
}

void CollabModel::init(Rng& rng) {
  for (auto& e : embeddings_) e.init(rng);
  for (auto& c : cross_) c.init(rng);
  deep_.init(rng);
  if (has_head_) head_.init(rng);
}

Matrix CollabModel::represent(const TabularBatch& batch, Trace* trace) const {
  if (batch.fields != fields()) {
    throw DimensionError("collab: batch has " + std::to_string(batch.fields) + " fields, model expects " +
                         std::to_string(fields()));
  }
  const std::size_t d = config_.embedding_dim;
  Matrix x0(batch.n, input_width());
  for (std::size_t r = 0; r < batch.n; ++r) {
    auto dst = x0.row(r);
    for (std::size_t f = 0; f < fields(); ++f) {
      const auto src = embeddings_[f].row(batch.at(r, f));
      std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(f * d));
    }
  }
  Trace local;
  Trace& t = trace ? *trace : local;
  t.cross_in.clear();
  t.cross_u.clear();
  Matrix xl = x0;
  for (const auto& c : cross_) {
    Matrix u;
    Matrix next = c.forward(x0, xl, u);
    t.cross_in.push_back(std::move(xl));
    t.cross_u.push_back(std::move(u));
    xl = std::move(next);
  }
  t.deep = deep_.forward(std::move(xl));
  t.x0 = std::move(x0);
  return t.deep.output();
}

void CollabModel::represent_backward(const TabularBatch& batch, const Trace& trace, const Matrix& dh) {
  Matrix dx = deep_.backward(trace.deep, dh, true);
  Matrix dx0(trace.x0.rows, trace.x0.cols);
  for (std::size_t l = cross_.size(); l-- > 0;) {
    dx = cross_[l].backward(trace.x0, trace.cross_in[l], trace.cross_u[l], dx, dx0);
  }
  kernels::active().axpy(1.0, dx.data.data(), dx0.data.data(), dx0.data.size());
  const std::size_t d = config_.embedding_dim;
  for (std::size_t r = 0; r < batch.n; ++r) {
    const auto g = dx0.row(r);
    for (std::size_t f = 0; f < fields(); ++f) {
      embeddings_[f].scatter_grad_row(batch.at(r, f), g.subspan(f * d, d));
    }
  }
}

CollabOutput CollabModel::forward(const TabularBatch& batch) const {
  CollabOutput out;
  out.h = represent(batch);
  const Matrix p = head().forward(out.h);
  out.p = p.data;
  return out;
}

DenseLayer& CollabModel::head() {
  if (!has_head_) throw ConfigError("collab: model was built without a prediction head");
  return head_;
}

const DenseLayer& CollabModel::head() const {
  if (!has_head_) throw ConfigError("collab: model was built without a prediction head");
  return head_;
}

std::vector<Parameter*> CollabModel::params() {
  std::vector<Parameter*> out;
  for (auto& e : embeddings_) out.push_back(&e.table());
  for (auto& c : cross_) {
    out.push_back(&c.linear().weight());
    out.push_back(&c.linear().bias());
  }
  for (Parameter* p : deep_.params()) out.push_back(p);
  if (has_head_) {
    out.push_back(&head_.weight());
    out.push_back(&head_.bias());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::uint32_t> vocab_of(const FieldSchema& schema) {
  std::vector<std::uint32_t> v;
  for (const auto& f : schema) {
    if (f.kind == FieldKind::categorical) v.push_back(f.vocab_capacity);
  }
  return v;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::size_t> parse_sizes(std::string_view s) {
  std::vector<std::size_t> out;
  while (!s.empty()) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    const auto comma = s.find(',');
    std::string_view tok = s.substr(0, comma);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ConfigError("expected a comma-separated list of integers, got '" + std::string(tok) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

void put_collab_meta(std::map<std::string, std::string>& meta, const CollabConfig& config,
                     const std::vector<std::uint32_t>& vocab) {
  meta["collab.variant"] = std::string(variant_name(config.variant));
  meta["collab.embedding_dim"] = std::to_string(config.embedding_dim);
  meta["collab.deep_dims"] = join_sizes(config.deep_dims);
  meta["collab.cross_layers"] = std::to_string(config.cross_layers);
  meta["collab.vocab"] = join_sizes({vocab.begin(), vocab.end()});
}

namespace {
const std::string& need(const std::map<std::string, std::string>& meta, const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) throw FormatError("checkpoint metadata lacks '" + key + "'");
  return it->second;
}
}  // namespace

CollabConfig collab_config_from_meta(const std::map<std::string, std::string>& meta) {
  CollabConfig c;
  c.variant = parse_variant(need(meta, "collab.variant"));
  c.embedding_dim = parse_sizes(need(meta, "collab.embedding_dim")).at(0);
  c.deep_dims = parse_sizes(need(meta, "collab.deep_dims"));
  c.cross_layers = parse_sizes(need(meta, "collab.cross_layers")).at(0);
  return c;
}

std::vector<std::uint32_t> vocab_from_meta(const std::map<std::string, std::string>& meta) {
  const auto v = parse_sizes(need(meta, "collab.vocab"));
  return {v.begin(), v.end()};
}

}  // namespace elec
