// Copyright 2026 The trajlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJLAB__TRAIN_HPP_
#define TRAJLAB__TRAIN_HPP_

/// \file
/// Mini-batch Adam training with either loss variant, deterministic
/// shuffling, best-validation checkpoint selection, and evaluation.
///
/// Determinism contract: given the same seed, config, and datasets, two
/// runs produce bit-identical parameters.  The per-epoch shuffle stream
/// is derived from (seed, epoch) alone and gradients accumulate in
/// sample-index order, so training can resume from a checkpoint at any
/// epoch boundary and land on the same trajectory.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trajlab/checkpoint.hpp"
#include "trajlab/dataset.hpp"
#include "trajlab/loss.hpp"
#include "trajlab/metrics.hpp"
#include "trajlab/net.hpp"
#include "trajlab/raster.hpp"

namespace trajlab
{

enum class LossVariant { kMtp, kAngleScaled };

std::string loss_variant_name(LossVariant v);
LossVariant loss_variant_from_name(const std::string & name);  // throws ArgumentError

struct TrainConfig
{
  double learning_rate = 1e-4;
  int batch_size = 100;
  int epochs = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  LossVariant loss_variant = LossVariant::kMtp;
  bool squared_regression = false;
  std::uint64_t seed = 1;
  double val_fraction = 0.2;     ///< used only when no explicit validation set is given
  bool select_best_val = true;   ///< false: return the final-epoch checkpoint
  double grad_clip = 0.0;        ///< global-norm clip; 0 disables

  void validate() const;  // throws ConfigError
};

/// One sample prepared for the model: rasterized layers plus kinematics
/// and the ground-truth rollout.
struct TrainSample
{
  std::vector<Tensor> layers;
  std::array<double, 3> kinematics{};
  std::vector<Vec2> gt;
  std::string sample_id;
};

/// Rasterizes every dataset sample against the given layer set.
std::vector<TrainSample> prepare_samples(
  const Dataset & dataset, const std::vector<LayerSpec> & specs, const RasterConfig & cfg);

/// Drivable masks for every dataset sample, for off-road evaluation.
std::vector<Mask> prepare_masks(const Dataset & dataset, const RasterConfig & cfg);

/// One bias-corrected Adam update, in place. Increments optim.step and
/// updates the moment buffers; a zero gradient leaves flat unchanged.
void adam_step(
  std::vector<double> & flat, const std::vector<double> & grads, OptimState & optim,
  const TrainConfig & cfg);

/// True when the sample id lands in the validation bucket: its hash is
/// 0 mod round(1/val_fraction). Stable across runs and dataset order.
bool in_validation_split(const std::string & sample_id, double val_fraction);

/// Deterministic 80/20-style split by sample-id hash: samples whose id
/// hashes to 0 mod round(1/val_fraction) go to validation.
void split_dataset(
  const std::vector<TrainSample> & all, double val_fraction,
  std::vector<TrainSample> & train_out, std::vector<TrainSample> & val_out);

struct EpochLog
{
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult
{
  Checkpoint checkpoint;            ///< selected per config (best validation or final)
  std::vector<EpochLog> epochs;
  std::vector<double> step_losses;  ///< batch loss per optimizer step
  int best_epoch = 0;               ///< 1-based epoch of the lowest validation loss
};

/// Trains from the given initial model.  With an empty validation set,
/// splits one off the training set by val_fraction (falling back to the
/// training set itself when the split leaves validation empty).  A
/// non-finite batch loss aborts with NumericError naming the epoch,
/// batch, and parameter norm.  Passing resume continues that checkpoint
/// at its recorded epoch boundary.
TrainResult train(
  const Model & init_model, const TrainConfig & cfg, const std::vector<TrainSample> & train_set,
  const std::vector<TrainSample> & val_set = {}, const Checkpoint * resume = nullptr);

/// Mean loss of the model over a sample set (no parameter updates).
double dataset_loss(
  const Model & model, const std::vector<TrainSample> & samples, LossVariant variant,
  bool squared_regression = false);

/// Per-sample loss breakdowns, for penalty auditing and diagnostics.
std::vector<LossBreakdown> sample_losses(
  const Model & model, const std::vector<TrainSample> & samples, LossVariant variant,
  bool squared_regression = false);

/// Value-level fused prediction for one prepared sample.
Prediction predict(const Model & model, const TrainSample & sample);

/// Metrics over a sample set: forwards every sample and aggregates.
MetricsReport evaluate(
  const Model & model, const std::vector<TrainSample> & samples, const std::vector<Mask> & masks,
  const RasterConfig & cfg, const std::vector<int> & k_list,
  const std::vector<int> & fde_k_list = {1}, const MetricsConfig & mc = {});

}  // namespace trajlab

#endif  // TRAJLAB__TRAIN_HPP_
