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

// Gain / vanilla network pair.
//
// The gain network concatenates its collaborative representation with the
// frozen adapter representation of the sample text, projects the result
// back to the collaborative width with one relu layer, and predicts from
// there. The vanilla network is a bare collaborative model and never reads
// text. Joint training minimizes
//
//   L_total = L_gain + L_van + L_score + alpha * L_rep
//
// where L_score (listwise distillation) and L_rep (representation MSE) treat
// the gain network's outputs as constants, so they only move vanilla
// parameters. L_gain only moves gain parameters; the adapter stays frozen.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "elec/checkpoint.hpp"
#include "elec/collab.hpp"
#include "elec/data.hpp"
#include "elec/mllm.hpp"
#include "elec/nn.hpp"

namespace elec {

/// Adapter representations for sample keys.
class RepresentationSource {
 public:
  virtual ~RepresentationSource() = default;
  virtual std::size_t rep_dim() const = 0;
  virtual Matrix reps(std::span<const std::uint64_t> keys) const = 0;
};

/// Reads the store and runs the adapter on every call (one store access per
/// key).
class LiveRepresentations final : public RepresentationSource {
 public:
  LiveRepresentations(const TextEmbeddingStore& store, const MllmAdapter& adapter);
  std::size_t rep_dim() const override { return adapter_.rep_dim(); }
  Matrix reps(std::span<const std::uint64_t> keys) const override;

 private:
  const TextEmbeddingStore& store_;
  const MllmAdapter& adapter_;
};

/// Adapter outputs computed once per key. Rows are bitwise identical to what
/// LiveRepresentations returns because the adapter is frozen and evaluates
/// each row independently.
class CachedRepresentations final : public RepresentationSource {
 public:
  CachedRepresentations(const LiveRepresentations& live, std::span<const Dataset* const> datasets);
  std::size_t rep_dim() const override { return table_.cols; }
  Matrix reps(std::span<const std::uint64_t> keys) const override;

 private:
  Matrix table_;
  std::vector<std::uint8_t> present_;
};

struct BranchOutput {
  Matrix h;
  std::vector<double> p;
};

class GainNetwork {
 public:
  struct Trace {
    CollabModel::Trace collab;
    Matrix fused_in;  // [c | r]
    Matrix h;
    Matrix p;
  };

  GainNetwork() = default;
  GainNetwork(std::vector<std::uint32_t> vocab, const CollabConfig& config, std::size_t adapter_rep_dim);

  void init(Rng& rng);

  std::size_t rep_dim() const { return collab_.rep_dim(); }
  std::size_t adapter_rep_dim() const { return adapter_rep_dim_; }
  std::size_t fusion_in_dim() const { return fusion_.in_dim(); }

  BranchOutput forward(const TabularBatch& batch, const RepresentationSource& reps, Trace* trace = nullptr) const;

  /// Backpropagates dL/dp (and dL/dh when non-null) into gain parameters.
  void backward(const TabularBatch& batch, const Trace& trace, std::span<const double> dp,
                const Matrix* dh = nullptr);

  CollabModel& collab() { return collab_; }
  DenseLayer& fusion() { return fusion_; }
  DenseLayer& prediction() { return prediction_; }
  std::vector<Parameter*> params();

  Checkpoint to_checkpoint() const;
  static GainNetwork from_checkpoint(const Checkpoint& ckpt);

 private:
  std::size_t adapter_rep_dim_ = 0;
  CollabModel collab_;
  DenseLayer fusion_;
  DenseLayer prediction_;
};

class VanillaNetwork {
 public:
  struct Trace {
    CollabModel::Trace collab;
    Matrix h;
    Matrix p;
  };

  VanillaNetwork() = default;
  VanillaNetwork(std::vector<std::uint32_t> vocab, const CollabConfig& config);

  void init(Rng& rng);

  std::size_t rep_dim() const { return collab_.rep_dim(); }

  BranchOutput forward(const TabularBatch& batch, Trace* trace = nullptr) const;
  void backward(const TabularBatch& batch, const Trace& trace, std::span<const double> dp,
                const Matrix* dh = nullptr);

  CollabModel& collab() { return collab_; }
  const CollabModel& collab() const { return collab_; }
  /// The prediction layer (the collaborative model's head).
  DenseLayer& prediction() { return collab_.head(); }
  std::vector<Parameter*> params();

  Checkpoint to_checkpoint() const;
  static VanillaNetwork from_checkpoint(const Checkpoint& ckpt);

 private:
  CollabModel collab_;
};

/// Vanilla click probabilities only; touches no text input.
std::vector<double> infer_vanilla(const VanillaNetwork& net, const TabularBatch& batch);

std::vector<double> predict_vanilla(const VanillaNetwork& net, const Dataset& dataset,
                                    std::size_t batch_size = 1024);
std::vector<double> predict_gain(const GainNetwork& net, const RepresentationSource& reps, const Dataset& dataset,
                                 std::size_t batch_size = 1024);

struct NetworkOutputs {
  std::vector<double> p_g;
  std::vector<double> p_v;
  Matrix h_g;
  Matrix h_v;
};

struct LossBreakdown {
  double l_gain = 0.0;
  double l_van = 0.0;
  double l_score = 0.0;
  double l_rep = 0.0;
  double l_total = 0.0;
};

struct TrainConfig {
  double alpha = 1.0;
  AdamConfig adam{};
  std::size_t batch_size = 256;
  std::size_t epochs = 3;
  std::uint64_t init_seed = 1;
  std::uint64_t shuffle_seed = 2;
  double prob_eps = 1e-7;

  /// Throws ConfigError.
  void validate() const;
};

/// Selects which terms of L_total contribute gradients.
enum LossTerm : unsigned {
  kLossGain = 1u << 0,
  kLossVanilla = 1u << 1,
  kLossScore = 1u << 2,
  kLossRep = 1u << 3,
  kLossAll = kLossGain | kLossVanilla | kLossScore | kLossRep,
};

struct LossGradients {
  std::vector<double> dp_g;
  std::vector<double> dp_v;
  Matrix dh_v;
};

LossBreakdown total_loss(const NetworkOutputs& out, std::span<const std::uint8_t> y, const TrainConfig& config,
                         LossGradients* grads = nullptr, unsigned terms = kLossAll);

struct EpochMetrics {
  std::size_t epoch = 0;
  LossBreakdown mean_loss;  // averaged over batches
  double val_auc = 0.0;     // vanilla; NaN when undefined
  double val_logloss = 0.0;
  double gain_val_auc = 0.0;
  double gain_val_logloss = 0.0;
};

/// One line of the metrics log.
std::string format_metrics_line(const EpochMetrics& m);

struct JointResult {
  GainNetwork gain;
  VanillaNetwork vanilla;
  std::vector<EpochMetrics> trace;
  std::size_t best_gain_epoch = 0;  // 0 = initialization
  std::size_t best_vanilla_epoch = 0;
};

/// Joint training. Returns the gain network with the best gain val AUC and
/// the vanilla network with the best vanilla val AUC (the last epoch when
/// val AUC is undefined). The adapter must be frozen and is never updated.
JointResult train_joint(const Dataset& train, const Dataset& val, const TextEmbeddingStore& store,
                        MllmAdapter& adapter, const CollabConfig& collab, const TrainConfig& config);

/// Same, with an already-built representation source (used to share one
/// cache across runs).
JointResult train_joint(const Dataset& train, const Dataset& val, const RepresentationSource& reps,
                        const CollabConfig& collab, const TrainConfig& config);

struct VanillaResult {
  VanillaNetwork vanilla;
  std::vector<EpochMetrics> trace;
  std::size_t best_epoch = 0;
};

/// Undistilled baseline: the vanilla network trained on L_van alone with the
/// same initialization and batch order as train_joint.
VanillaResult train_vanilla_only(const Dataset& train, const Dataset& val, const CollabConfig& collab,
                                 const TrainConfig& config);

}  // namespace elec
