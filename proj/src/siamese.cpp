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

#include "elec/siamese.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "elec/error.hpp"
#include "elec/hash.hpp"
#include "elec/losses.hpp"
#include "elec/metrics.hpp"

namespace elec {

namespace {

constexpr std::uint64_t kGainInitSalt = 0x6761696e;     // "gain"
constexpr std::uint64_t kVanillaInitSalt = 0x76616e;    // "van"

Matrix column(std::span<const double> v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data.begin());
  return m;
}

}  // namespace

LiveRepresentations::LiveRepresentations(const TextEmbeddingStore& store, const MllmAdapter& adapter)
    : store_(store), adapter_(adapter) {
  if (store.dim() != adapter.config().input_dim) {
    throw BindingError("embedding store dim " + std::to_string(store.dim()) + " != adapter input_dim " +
                       std::to_string(adapter.config().input_dim));
  }
}

Matrix LiveRepresentations::reps(std::span<const std::uint64_t> keys) const {
  return adapter_.forward(gather_rows(store_, keys)).rep;
}

CachedRepresentations::CachedRepresentations(const LiveRepresentations& live,
                                             std::span<const Dataset* const> datasets) {
  std::uint64_t count = 0;
  for (const Dataset* d : datasets) {
    for (const auto& s : d->samples) count = std::max(count, s.key + 1);
  }
  table_ = Matrix(count, live.rep_dim());
  present_.assign(count, 0);
  constexpr std::size_t kChunk = 1024;
  std::vector<std::uint64_t> keys;
  auto flush = [&] {
    if (keys.empty()) return;
    const Matrix r = live.reps(keys);
    for (std::size_t k = 0; k < keys.size(); ++k) {
      std::copy(r.row(k).begin(), r.row(k).end(), table_.row(keys[k]).begin());
      present_[keys[k]] = 1;
    }
    keys.clear();
  };
  for (const Dataset* d : datasets) {
    for (const auto& s : d->samples) {
      if (present_[s.key]) continue;
      keys.push_back(s.key);
      present_[s.key] = 1;  // provisional, dedups within a chunk
      if (keys.size() == kChunk) flush();
    }
  }
  flush();
}

Matrix CachedRepresentations::reps(std::span<const std::uint64_t> keys) const {
  Matrix out(keys.size(), table_.cols);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (keys[k] >= present_.size() || !present_[keys[k]]) {
      throw BindingError("no cached representation for sample " + std::to_string(keys[k]));
    }
    std::copy(table_.row(keys[k]).begin(), table_.row(keys[k]).end(), out.row(k).begin());
  }
  return out;
}

// ---------------------------------------------------------------------------

GainNetwork::GainNetwork(std::vector<std::uint32_t> vocab, const CollabConfig& config, std::size_t adapter_rep_dim)
    : adapter_rep_dim_(adapter_rep_dim),
      collab_(std::move(vocab), config, "gain.collab", /*with_head=*/false) {
  if (adapter_rep_dim == 0) throw ConfigError("gain network: adapter rep_dim must be >= 1");
  fusion_ = DenseLayer("gain.fusion", collab_.rep_dim() + adapter_rep_dim, collab_.rep_dim(), Activation::relu);
  prediction_ = DenseLayer("gain.prediction", collab_.rep_dim(), 1, Activation::sigmoid);
}

void GainNetwork::init(Rng& rng) {
  collab_.init(rng);
  fusion_.init(rng);
  prediction_.init(rng);
}

BranchOutput GainNetwork::forward(const TabularBatch& batch, const RepresentationSource& reps, Trace* trace) const {
  if (reps.rep_dim() != adapter_rep_dim_) {
    throw BindingError("gain network expects adapter rep_dim " + std::to_string(adapter_rep_dim_) + ", got " +
                       std::to_string(reps.rep_dim()));
  }
  Trace local;
  Trace& t = trace ? *trace : local;
  const Matrix c = collab_.represent(batch, &t.collab);
  const Matrix r = reps.reps(batch.keys);
  t.fused_in = hconcat(c, r);
  t.h = fusion_.forward(t.fused_in);
  t.p = prediction_.forward(t.h);
  return BranchOutput{t.h, t.p.data};
}

void GainNetwork::backward(const TabularBatch& batch, const Trace& trace, std::span<const double> dp,
                           const Matrix* dh) {
  Matrix dh_total = prediction_.backward(trace.h, trace.p, column(dp), true);
  if (dh) {
    if (dh->rows != dh_total.rows || dh->cols != dh_total.cols) throw DimensionError("gain backward: dh shape");
    for (std::size_t i = 0; i < dh_total.data.size(); ++i) dh_total.data[i] += dh->data[i];
  }
  const Matrix dfused = fusion_.backward(trace.fused_in, trace.h, dh_total, true);
  // Only the collaborative half flows further; the adapter half is frozen input.
  const std::size_t dc = collab_.rep_dim();
  Matrix dcollab(dfused.rows, dc);
  for (std::size_t r = 0; r < dfused.rows; ++r) {
    std::copy_n(dfused.row(r).begin(), dc, dcollab.row(r).begin());
  }
  collab_.represent_backward(batch, trace.collab, dcollab);
}

std::vector<Parameter*> GainNetwork::params() {
  auto out = collab_.params();
  for (Parameter* p : {&fusion_.weight(), &fusion_.bias(), &prediction_.weight(), &prediction_.bias()}) {
    out.push_back(p);
  }
  return out;
}

Checkpoint GainNetwork::to_checkpoint() const {
  Checkpoint c;
  c.tag = "gain";
  auto& self = const_cast<GainNetwork&>(*this);
  put_collab_meta(c.meta, collab_.config(), collab_.vocab());
  c.meta["gain.adapter_rep_dim"] = std::to_string(adapter_rep_dim_);
  auto ps = self.params();
  append_params(c, ps);
  return c;
}

GainNetwork GainNetwork::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.tag != "gain") throw FormatError("expected a gain checkpoint, got '" + ckpt.tag + "'");
  GainNetwork g(vocab_from_meta(ckpt.meta), collab_config_from_meta(ckpt.meta),
                parse_sizes(ckpt.meta_at("gain.adapter_rep_dim")).at(0));
  auto ps = g.params();
  restore_params(ckpt, ps);
  return g;
}

// ---------------------------------------------------------------------------

VanillaNetwork::VanillaNetwork(std::vector<std::uint32_t> vocab, const CollabConfig& config)
    : collab_(std::move(vocab), config, "vanilla.collab", /*with_head=*/true) {}

void VanillaNetwork::init(Rng& rng) { collab_.init(rng); }

BranchOutput VanillaNetwork::forward(const TabularBatch& batch, Trace* trace) const {
  Trace local;
  Trace& t = trace ? *trace : local;
  t.h = collab_.represent(batch, &t.collab);
  t.p = collab_.head().forward(t.h);
  return BranchOutput{t.h, t.p.data};
}

void VanillaNetwork::backward(const TabularBatch& batch, const Trace& trace, std::span<const double> dp,
                              const Matrix* dh) {
  Matrix dh_total = collab_.head().backward(trace.h, trace.p, column(dp), true);
  if (dh) {
    if (dh->rows != dh_total.rows || dh->cols != dh_total.cols) throw DimensionError("vanilla backward: dh shape");
    for (std::size_t i = 0; i < dh_total.data.size(); ++i) dh_total.data[i] += dh->data[i];
  }
  collab_.represent_backward(batch, trace.collab, dh_total);
}

std::vector<Parameter*> VanillaNetwork::params() { return collab_.params(); }

Checkpoint VanillaNetwork::to_checkpoint() const {
  Checkpoint c;
  c.tag = "vanilla";
  put_collab_meta(c.meta, collab_.config(), collab_.vocab());
  auto ps = const_cast<VanillaNetwork&>(*this).params();
  append_params(c, ps);
  return c;
}

VanillaNetwork VanillaNetwork::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.tag != "vanilla") throw FormatError("expected a vanilla checkpoint, got '" + ckpt.tag + "'");
  VanillaNetwork v(vocab_from_meta(ckpt.meta), collab_config_from_meta(ckpt.meta));
  auto ps = v.params();
  restore_params(ckpt, ps);
  return v;
}

std::vector<double> infer_vanilla(const VanillaNetwork& net, const TabularBatch& batch) {
  return net.forward(batch).p;
}

std::vector<double> predict_vanilla(const VanillaNetwork& net, const Dataset& dataset, std::size_t batch_size) {
  std::vector<double> p;
  p.reserve(dataset.size());
  for (const Batch& b : batches(dataset, batch_size)) {
    const auto out = infer_vanilla(net, gather(dataset, b));
    p.insert(p.end(), out.begin(), out.end());
  }
  return p;
}

std::vector<double> predict_gain(const GainNetwork& net, const RepresentationSource& reps, const Dataset& dataset,
                                 std::size_t batch_size) {
  std::vector<double> p;
  p.reserve(dataset.size());
  for (const Batch& b : batches(dataset, batch_size)) {
    const auto out = net.forward(gather(dataset, b), reps).p;
    p.insert(p.end(), out.begin(), out.end());
  }
  return p;
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("train: alpha must be >= 0");
  if (!(prob_eps > 0.0 && prob_eps < 0.5)) throw ConfigError("train: prob_eps must lie in (0, 0.5)");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(adam.lr > 0.0)) throw ConfigError("train: lr must be > 0");
}

LossBreakdown total_loss(const NetworkOutputs& out, std::span<const std::uint8_t> y, const TrainConfig& config,
                         LossGradients* grads, unsigned terms) {
  const std::size_t n = y.size();
  if (out.p_g.size() != n || out.p_v.size() != n) throw DimensionError("total_loss: probability count mismatch");
  LossBreakdown lb;
  const double eps = config.prob_eps;
  std::vector<double> g_gain, g_van, g_score;
  Matrix g_rep;
  lb.l_gain = bce_loss(out.p_g, y, eps, grads ? &g_gain : nullptr);
  lb.l_van = bce_loss(out.p_v, y, eps, grads ? &g_van : nullptr);
  lb.l_score = clid_loss(out.p_g, out.p_v, eps, grads ? &g_score : nullptr);
  lb.l_rep = rep_loss(out.h_g, out.h_v, grads ? &g_rep : nullptr);
  lb.l_total = lb.l_gain + lb.l_van + lb.l_score + config.alpha * lb.l_rep;
  if (grads) {
    grads->dp_g.assign(n, 0.0);
    grads->dp_v.assign(n, 0.0);
    grads->dh_v = Matrix(out.h_v.rows, out.h_v.cols);
    if (terms & kLossGain) grads->dp_g = g_gain;
    for (std::size_t i = 0; i < n; ++i) {
      if (terms & kLossVanilla) grads->dp_v[i] += g_van[i];
      if (terms & kLossScore) grads->dp_v[i] += g_score[i];
    }
    if ((terms & kLossRep) && config.alpha != 0.0) {
      for (std::size_t i = 0; i < g_rep.data.size(); ++i) grads->dh_v.data[i] = config.alpha * g_rep.data[i];
    }
  }
  return lb;
}

std::string format_metrics_line(const EpochMetrics& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "epoch=%zu l_gain=%.6f l_van=%.6f l_score=%.6f l_rep=%.6f l_total=%.6f val_auc=%.4f "
                "val_logloss=%.4f gain_val_auc=%.4f gain_val_logloss=%.4f",
                m.epoch, m.mean_loss.l_gain, m.mean_loss.l_van, m.mean_loss.l_score, m.mean_loss.l_rep,
                m.mean_loss.l_total, m.val_auc, m.val_logloss, m.gain_val_auc, m.gain_val_logloss);
  return buf;
}

namespace {

struct Score {
  double auc = std::numeric_limits<double>::quiet_NaN();
  double logloss = std::numeric_limits<double>::quiet_NaN();
};

Score score(const Dataset& val, const std::vector<double>& p) {
  Score s;
  if (val.empty()) return s;
  std::vector<std::uint8_t> y;
  y.reserve(val.size());
  for (const auto& smp : val.samples) y.push_back(smp.label);
  s.logloss = logloss(y, p);
  try {
    s.auc = auc(y, p);
  } catch (const UndefinedMetricError&) {
  }
  return s;
}

// NaN never wins; ties keep the earlier epoch.
bool improves(double candidate, double best) {
  if (std::isnan(candidate)) return false;
  return std::isnan(best) || candidate > best;
}

Rng gain_rng(std::uint64_t seed) { return Rng(mix64(seed ^ kGainInitSalt)); }
Rng vanilla_rng(std::uint64_t seed) { return Rng(mix64(seed ^ kVanillaInitSalt)); }

}  // namespace

JointResult train_joint(const Dataset& train, const Dataset& val, const TextEmbeddingStore& store,
                        MllmAdapter& adapter, const CollabConfig& collab, const TrainConfig& config) {
  adapter.set_frozen(true);
  store.check_covers(train);
  store.check_covers(val);
  const LiveRepresentations live(store, adapter);
  const Dataset* parts[] = {&train, &val};
  const CachedRepresentations cached(live, parts);
  return train_joint(train, val, cached, collab, config);
}

JointResult train_joint(const Dataset& train, const Dataset& val, const RepresentationSource& reps,
                        const CollabConfig& collab, const TrainConfig& config) {
  config.validate();
  if (!(train.schema == val.schema) && !val.empty()) throw BindingError("train/val schema mismatch");
  const auto vocab = vocab_of(train.schema);

  JointResult res;
  res.gain = GainNetwork(vocab, collab, reps.rep_dim());
  res.vanilla = VanillaNetwork(vocab, collab);
  {
    Rng g = gain_rng(config.init_seed);
    res.gain.init(g);
    Rng v = vanilla_rng(config.init_seed);
    res.vanilla.init(v);
  }
  GainNetwork gain = res.gain;
  VanillaNetwork vanilla = res.vanilla;

  std::vector<Parameter*> trainable = gain.params();
  for (Parameter* p : vanilla.params()) trainable.push_back(p);
  Adam opt(trainable, config.adam);

  double best_gain = std::numeric_limits<double>::quiet_NaN();
  double best_van = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochMetrics em;
    em.epoch = epoch;
    std::size_t nb = 0;
    for (const Batch& b : batches(train, config.batch_size, config.shuffle_seed + epoch)) {
      const TabularBatch tb = gather(train, b);
      const auto y = labels_of(train, b);
      GainNetwork::Trace gt;
      VanillaNetwork::Trace vt;
      auto go = gain.forward(tb, reps, &gt);
      auto vo = vanilla.forward(tb, &vt);
      NetworkOutputs out{std::move(go.p), std::move(vo.p), std::move(go.h), std::move(vo.h)};
      LossGradients grads;
      const LossBreakdown lb = total_loss(out, y, config, &grads);
      gain.backward(tb, gt, grads.dp_g);
      vanilla.backward(tb, vt, grads.dp_v, &grads.dh_v);
      opt.step();

      em.mean_loss.l_gain += lb.l_gain;
      em.mean_loss.l_van += lb.l_van;
      em.mean_loss.l_score += lb.l_score;
      em.mean_loss.l_rep += lb.l_rep;
      em.mean_loss.l_total += lb.l_total;
      ++nb;
    }
    if (nb) {
      const double inv = 1.0 / static_cast<double>(nb);
      em.mean_loss.l_gain *= inv;
      em.mean_loss.l_van *= inv;
      em.mean_loss.l_score *= inv;
      em.mean_loss.l_rep *= inv;
      em.mean_loss.l_total *= inv;
    }
    const Score vs = score(val, predict_vanilla(vanilla, val));
    const Score gs = score(val, predict_gain(gain, reps, val));
    em.val_auc = vs.auc;
    em.val_logloss = vs.logloss;
    em.gain_val_auc = gs.auc;
    em.gain_val_logloss = gs.logloss;
    res.trace.push_back(em);

    const bool last = epoch == config.epochs;
    if (improves(gs.auc, best_gain) || (std::isnan(best_gain) && last)) {
      if (!std::isnan(gs.auc)) best_gain = gs.auc;
      res.gain = gain;
      res.best_gain_epoch = epoch;
    }
    if (improves(vs.auc, best_van) || (std::isnan(best_van) && last)) {
      if (!std::isnan(vs.auc)) best_van = vs.auc;
      res.vanilla = vanilla;
      res.best_vanilla_epoch = epoch;
    }
  }
  return res;
}

VanillaResult train_vanilla_only(const Dataset& train, const Dataset& val, const CollabConfig& collab,
                                 const TrainConfig& config) {
  config.validate();
  VanillaResult res;
  res.vanilla = VanillaNetwork(vocab_of(train.schema), collab);
  {
    Rng v = vanilla_rng(config.init_seed);
    res.vanilla.init(v);
  }
  VanillaNetwork vanilla = res.vanilla;
  Adam opt(vanilla.params(), config.adam);
  double best = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochMetrics em;
    em.epoch = epoch;
    std::size_t nb = 0;
    for (const Batch& b : batches(train, config.batch_size, config.shuffle_seed + epoch)) {
      const TabularBatch tb = gather(train, b);
      const auto y = labels_of(train, b);
      VanillaNetwork::Trace vt;
      const auto vo = vanilla.forward(tb, &vt);
      std::vector<double> dp;
      const double l = bce_loss(vo.p, y, config.prob_eps, &dp);
      vanilla.backward(tb, vt, dp);
      opt.step();
      em.mean_loss.l_van += l;
      ++nb;
    }
    if (nb) em.mean_loss.l_van /= static_cast<double>(nb);
    em.mean_loss.l_total = em.mean_loss.l_van;
    const Score vs = score(val, predict_vanilla(vanilla, val));
    em.val_auc = vs.auc;
    em.val_logloss = vs.logloss;
    em.gain_val_auc = std::numeric_limits<double>::quiet_NaN();
    em.gain_val_logloss = std::numeric_limits<double>::quiet_NaN();
    res.trace.push_back(em);
    if (improves(vs.auc, best) || (std::isnan(best) && epoch == config.epochs)) {
      if (!std::isnan(vs.auc)) best = vs.auc;
      res.vanilla = vanilla;
      res.best_epoch = epoch;
    }
  }
  return res;
}

}  // namespace elec
