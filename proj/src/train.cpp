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

#include "trajlab/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "trajlab/error.hpp"
#include "trajlab/rng.hpp"

namespace trajlab
{
namespace
{

std::vector<double> flatten_gt(const std::vector<Vec2> & gt)
{
  std::vector<double> flat;
  flat.reserve(gt.size() * 2);
  for (const Vec2 & p : gt) {
    flat.push_back(p.x);
    flat.push_back(p.y);
  }
  return flat;
}

struct SampleLossNodes
{
  NodeId total = -1;
  LossBreakdown breakdown;
};

/// Picks the winner and penalty from the forward values, then attaches
/// the differentiable regression + classification terms for that winner.
SampleLossNodes attach_sample_loss(
  Graph & g, const ModelGraph::Forward & fwd, const TrainSample & sample, LossVariant variant,
  bool squared_regression)
{
  const Tensor & traj = g.value(fwd.fused_traj);
  const Tensor & conf = g.value(fwd.fused_conf);
  std::vector<std::vector<Vec2>> paths(static_cast<std::size_t>(traj.rows));
  for (int m = 0; m < traj.rows; ++m) {
    for (int c = 0; c + 1 < traj.cols; c += 2) {
      paths[static_cast<std::size_t>(m)].push_back({traj.at(m, c), traj.at(m, c + 1)});
    }
  }

  SampleLossNodes out;
  out.breakdown = variant == LossVariant::kAngleScaled
                    ? angle_scaled_loss(paths, conf.v, sample.gt, squared_regression)
                    : mtp_loss(paths, conf.v, sample.gt, squared_regression);

  const int w = out.breakdown.winner_index;
  const std::vector<double> gt_flat = flatten_gt(sample.gt);
  NodeId winner_row = g.slice_rows(fwd.fused_traj, w, w + 1);
  NodeId reg = squared_regression ? g.mean_pointwise_l2_squared(winner_row, gt_flat)
                                  : g.mean_pointwise_l2(winner_row, gt_flat);
  NodeId cls = g.neg_log_floor(g.pick(fwd.fused_conf, 0, w), kConfidenceFloor);
  out.total = g.add(reg, cls);
  if (variant == LossVariant::kAngleScaled) {
    out.total = g.scale(out.total, out.breakdown.penalty);
  }
  return out;
}

double param_norm(const std::vector<double> & flat)
{
  double acc = 0.0;
  for (double v : flat) {
    acc += v * v;
  }
  return std::sqrt(acc);
}

}  // namespace

std::string loss_variant_name(LossVariant v)
{
  return v == LossVariant::kAngleScaled ? "angle_scaled" : "mtp";
}

LossVariant loss_variant_from_name(const std::string & name)
{
  if (name == "mtp") {
    return LossVariant::kMtp;
  }
  if (name == "angle_scaled") {
    return LossVariant::kAngleScaled;
  }
  throw ArgumentError("unknown loss variant: " + name);
}

void TrainConfig::validate() const
{
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (batch_size < 1) {
    throw ConfigError("batch_size must be >= 1");
  }
  if (epochs < 1) {
    throw ConfigError("epochs must be >= 1");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) {
    throw ConfigError("adam_eps must be positive");
  }
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val_fraction must lie in [0, 1)");
  }
  if (grad_clip < 0.0) {
    throw ConfigError("grad_clip must be >= 0");
  }
}

std::vector<TrainSample> prepare_samples(
  const Dataset & dataset, const std::vector<LayerSpec> & specs, const RasterConfig & cfg)
{
  if (specs.empty()) {
    throw ArgumentError("prepare_samples requires at least one layer spec");
  }
  std::vector<TrainSample> out;
  out.reserve(dataset.samples.size());
  for (const Sample & s : dataset.samples) {
    TrainSample ts;
    ts.layers.reserve(specs.size());
    for (const LayerSpec & spec : specs) {
      ts.layers.push_back(grid_to_tensor(rasterize_layer(s.scene, spec, cfg)));
    }
    ts.kinematics = s.kinematics;
    ts.gt = s.gt.points;
    ts.sample_id = s.sample_id;
    out.push_back(std::move(ts));
  }
  return out;
}

std::vector<Mask> prepare_masks(const Dataset & dataset, const RasterConfig & cfg)
{
  std::vector<Mask> out;
  out.reserve(dataset.samples.size());
  for (const Sample & s : dataset.samples) {
    out.push_back(drivable_mask(s.scene, cfg));
  }
  return out;
}

void adam_step(
  std::vector<double> & flat, const std::vector<double> & grads, OptimState & optim,
  const TrainConfig & cfg)
{
  if (flat.size() != grads.size() || flat.size() != optim.m.size() ||
      flat.size() != optim.v.size()) {
    throw ArgumentError("adam_step: parameter, gradient and state sizes must match");
  }
  optim.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(optim.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(optim.step));
  for (std::size_t i = 0; i < flat.size(); ++i) {
    optim.m[i] = cfg.beta1 * optim.m[i] + (1.0 - cfg.beta1) * grads[i];
    optim.v[i] = cfg.beta2 * optim.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double mhat = optim.m[i] / bc1;
    const double vhat = optim.v[i] / bc2;
    flat[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

bool in_validation_split(const std::string & sample_id, double val_fraction)
{
  if (val_fraction <= 0.0) {
    return false;
  }
  const std::uint64_t modulus =
    std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::llround(1.0 / val_fraction)));
  return fnv1a64(sample_id) % modulus == 0;
}

void split_dataset(
  const std::vector<TrainSample> & all, double val_fraction,
  std::vector<TrainSample> & train_out, std::vector<TrainSample> & val_out)
{
  train_out.clear();
  val_out.clear();
  for (const TrainSample & s : all) {
    if (in_validation_split(s.sample_id, val_fraction)) {
      val_out.push_back(s);
    } else {
      train_out.push_back(s);
    }
  }
}

double dataset_loss(
  const Model & model, const std::vector<TrainSample> & samples, LossVariant variant,
  bool squared_regression)
{
  if (samples.empty()) {
    throw ArgumentError("dataset_loss over an empty sample set");
  }
  double acc = 0.0;
  for (const LossBreakdown & b : sample_losses(model, samples, variant, squared_regression)) {
    acc += b.total;
  }
  return acc / static_cast<double>(samples.size());
}

std::vector<LossBreakdown> sample_losses(
  const Model & model, const std::vector<TrainSample> & samples, LossVariant variant,
  bool squared_regression)
{
  std::vector<LossBreakdown> out;
  out.reserve(samples.size());
  for (const TrainSample & s : samples) {
    Graph g;
    ModelGraph mg(g, model);
    ModelGraph::Forward fwd = mg.forward(s.layers, s.kinematics);
    out.push_back(attach_sample_loss(g, fwd, s, variant, squared_regression).breakdown);
  }
  return out;
}

Prediction predict(const Model & model, const TrainSample & sample)
{
  Graph g;
  ModelGraph mg(g, model);
  ModelGraph::Forward fwd = mg.forward(sample.layers, sample.kinematics);
  Prediction pred;
  const Tensor & traj = g.value(fwd.fused_traj);
  pred.trajectories.resize(static_cast<std::size_t>(traj.rows));
  for (int m = 0; m < traj.rows; ++m) {
    for (int c = 0; c + 1 < traj.cols; c += 2) {
      pred.trajectories[static_cast<std::size_t>(m)].push_back({traj.at(m, c), traj.at(m, c + 1)});
    }
  }
  pred.confidences = g.value(fwd.fused_conf).v;
  return pred;
}

MetricsReport evaluate(
  const Model & model, const std::vector<TrainSample> & samples, const std::vector<Mask> & masks,
  const RasterConfig & cfg, const std::vector<int> & k_list,
  const std::vector<int> & fde_k_list, const MetricsConfig & mc)
{
  std::vector<Prediction> preds;
  std::vector<std::vector<Vec2>> gts;
  preds.reserve(samples.size());
  gts.reserve(samples.size());
  for (const TrainSample & s : samples) {
    preds.push_back(predict(model, s));
    gts.push_back(s.gt);
  }
  return aggregate(preds, gts, masks, cfg, k_list, fde_k_list, mc);
}

TrainResult train(
  const Model & init_model, const TrainConfig & cfg, const std::vector<TrainSample> & train_set,
  const std::vector<TrainSample> & val_set, const Checkpoint * resume)
{
  cfg.validate();
  if (train_set.empty()) {
    throw ArgumentError("train: empty training set");
  }

  std::vector<TrainSample> train_samples;
  std::vector<TrainSample> val_samples;
  if (val_set.empty()) {
    split_dataset(train_set, cfg.val_fraction, train_samples, val_samples);
    if (train_samples.empty()) {
      train_samples = train_set;
      val_samples.clear();
    }
    if (val_samples.empty()) {
      val_samples = train_samples;  // tiny sets: validate on what we train on
    }
  } else {
    train_samples = train_set;
    val_samples = val_set;
  }

  Model model = init_model;
  std::vector<double> flat = model.flatten();
  OptimState optim;
  optim.m.assign(flat.size(), 0.0);
  optim.v.assign(flat.size(), 0.0);
  int start_epoch = 0;
  if (resume != nullptr) {
    if (resume->model.param_count() != model.param_count()) {
      throw ConfigError("resume checkpoint does not match the model architecture");
    }
    model = resume->model;
    flat = model.flatten();
    optim = resume->optim;
    start_epoch = static_cast<int>(resume->epoch);
  }

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_flat = flat;
  OptimState best_optim = optim;
  int best_epoch = start_epoch;

  const std::size_t n = train_samples.size();
  std::vector<std::size_t> order(n);

  for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double epoch_loss_sum = 0.0;
    for (std::size_t batch_start = 0, batch_id = 0; batch_start < n;
         batch_start += static_cast<std::size_t>(cfg.batch_size), ++batch_id) {
      const std::size_t batch_end =
        std::min(n, batch_start + static_cast<std::size_t>(cfg.batch_size));

      Graph g;
      ModelGraph mg(g, model);
      std::vector<NodeId> losses;
      losses.reserve(batch_end - batch_start);
      for (std::size_t i = batch_start; i < batch_end; ++i) {
        const TrainSample & s = train_samples[order[i]];
        ModelGraph::Forward fwd = mg.forward(s.layers, s.kinematics);
        losses.push_back(
          attach_sample_loss(g, fwd, s, cfg.loss_variant, cfg.squared_regression).total);
      }
      NodeId batch_loss = g.mean_of(losses);
      const double loss_value = g.value(batch_loss).at(0, 0);
      if (!std::isfinite(loss_value)) {
        char msg[160];
        std::snprintf(
          msg, sizeof(msg), "non-finite loss at epoch %d batch %zu (parameter norm %.6g)",
          epoch + 1, batch_id, param_norm(flat));
        throw NumericError(msg);
      }
      g.backward(batch_loss);
      std::vector<double> grads = mg.flat_param_grads();

      if (cfg.grad_clip > 0.0) {
        const double gnorm = param_norm(grads);
        if (gnorm > cfg.grad_clip) {
          const double scale = cfg.grad_clip / gnorm;
          for (double & gv : grads) {
            gv *= scale;
          }
        }
      }

      adam_step(flat, grads, optim, cfg);
      model.unflatten(flat);

      result.step_losses.push_back(loss_value);
      epoch_loss_sum += loss_value * static_cast<double>(batch_end - batch_start);
    }

    const double val_loss =
      dataset_loss(model, val_samples, cfg.loss_variant, cfg.squared_regression);
    const auto t1 = std::chrono::steady_clock::now();

    EpochLog log;
    log.epoch = epoch + 1;
    log.train_loss = epoch_loss_sum / static_cast<double>(n);
    log.val_loss = val_loss;
    log.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.epochs.push_back(log);

    if (val_loss < best_val) {
      best_val = val_loss;
      best_flat = flat;
      best_optim = optim;
      best_epoch = epoch + 1;
    }
  }

  result.best_epoch = best_epoch;
  Checkpoint ckpt;
  ckpt.model = model;
  if (cfg.select_best_val) {
    ckpt.model.unflatten(best_flat);
    ckpt.optim = best_optim;
    ckpt.epoch = best_epoch;
    ckpt.best_validation = true;
    ckpt.validation_loss = best_val;
  } else {
    ckpt.optim = optim;
    ckpt.epoch = cfg.epochs;
    ckpt.best_validation = false;
    ckpt.validation_loss = result.epochs.empty() ? 0.0 : result.epochs.back().val_loss;
  }
  result.checkpoint = std::move(ckpt);
  return result;
}

}  // namespace trajlab
