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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "trajlab/checkpoint.hpp"
#include "trajlab/error.hpp"
#include "trajlab/rng.hpp"
#include "trajlab/scenegen.hpp"
#include "trajlab/train.hpp"

namespace
{

using trajlab::ArchConfig;
using trajlab::Checkpoint;
using trajlab::Dataset;
using trajlab::LossVariant;
using trajlab::Model;
using trajlab::RasterConfig;
using trajlab::TrainConfig;
using trajlab::TrainSample;

constexpr int kHorizon = 6;

Dataset make_dataset(const std::array<double, 4> & weights, int count, std::uint64_t seed)
{
  trajlab::GenParams gen;
  gen.family_weights = weights;
  gen.horizon_steps = kHorizon;
  gen.agent_count_max = 3;
  Dataset ds;
  ds.horizon_steps = gen.horizon_steps;
  ds.frequency_hz = gen.frequency_hz;
  for (int i = 0; i < count; ++i) {
    ds.samples.push_back(trajlab::generate_scene(trajlab::derive_seed(seed, i), gen));
  }
  return ds;
}

RasterConfig small_raster()
{
  RasterConfig cfg;
  cfg.size_px = 16;
  cfg.extent_m = 40.0;
  cfg.target_offset = {0.5, 0.5};
  return cfg;
}

ArchConfig small_arch(int backbones)
{
  ArchConfig cfg;
  cfg.raster_size = 16;
  cfg.horizon_steps = kHorizon;
  cfg.backbones = backbones;
  cfg.hypotheses_per_head = 2;
  cfg.modes = 2;
  cfg.conv_channels = {4, 8};
  cfg.head_hidden = 16;
  cfg.token_dim = 16;
  cfg.id_embed_dim = 4;
  return cfg;
}

std::vector<trajlab::LayerSpec> two_layers()
{
  const auto all = trajlab::default_layer_specs();
  return {all[0], all[1]};
}

std::vector<TrainSample> prepare(const Dataset & ds)
{
  return trajlab::prepare_samples(ds, two_layers(), small_raster());
}

}  // namespace

TEST_CASE("adam step is bias corrected and a zero gradient is a no-op")
{
  TrainConfig cfg;
  cfg.learning_rate = 0.1;

  std::vector<double> flat = {1.0, -2.0};
  trajlab::OptimState optim;
  optim.m.assign(2, 0.0);
  optim.v.assign(2, 0.0);

  trajlab::adam_step(flat, {0.0, 0.0}, optim, cfg);
  CHECK(flat == std::vector<double>{1.0, -2.0});
  CHECK(optim.step == 1);

  trajlab::OptimState fresh;
  fresh.m.assign(2, 0.0);
  fresh.v.assign(2, 0.0);
  trajlab::adam_step(flat, {0.5, 0.0}, fresh, cfg);
  // [DERIVED] first step from zero moments: m-hat = g, v-hat = g^2, so
  // the update is lr * g / (|g| + eps).
  const double expected = 1.0 - 0.1 * 0.5 / (0.5 + cfg.adam_eps);
  CHECK(flat[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(flat[1] == -2.0);

  std::vector<double> wrong = {1.0};
  trajlab::OptimState wrong_state;
  wrong_state.m.assign(1, 0.0);
  wrong_state.v.assign(1, 0.0);
  CHECK_THROWS_AS(
    trajlab::adam_step(wrong, {0.0, 0.0}, wrong_state, cfg), trajlab::ArgumentError);
}

TEST_CASE("train config rejects nonsense values")
{
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
  cfg = TrainConfig{};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
  cfg = TrainConfig{};
  cfg.beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
}

TEST_CASE("validation split is deterministic and tracks the fraction")
{
  CHECK_FALSE(trajlab::in_validation_split("s0001", 0.0));
  CHECK_FALSE(trajlab::in_validation_split("s0001", -1.0));
  int val = 0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "s%016x", i * 2654435761u);
    const bool first = trajlab::in_validation_split(id, 0.2);
    CHECK(first == trajlab::in_validation_split(id, 0.2));
    val += first ? 1 : 0;
  }
  const double frac = static_cast<double>(val) / n;
  CHECK(frac > 0.10);
  CHECK(frac < 0.32);

  const Dataset ds = make_dataset({1.0, 1.0, 1.0, 1.0}, 25, 5);
  const std::vector<TrainSample> all = prepare(ds);
  std::vector<TrainSample> train_out;
  std::vector<TrainSample> val_out;
  trajlab::split_dataset(all, 0.2, train_out, val_out);
  CHECK(train_out.size() + val_out.size() == all.size());
  for (const auto & s : val_out) {
    CHECK(trajlab::in_validation_split(s.sample_id, 0.2));
  }
  for (const auto & s : train_out) {
    CHECK_FALSE(trajlab::in_validation_split(s.sample_id, 0.2));
  }
}

TEST_CASE("a tiny straight dataset can be overfit")
{
  const Dataset ds = make_dataset({1.0, 0.0, 0.0, 0.0}, 16, 11);
  const std::vector<TrainSample> samples = prepare(ds);
  const Model init = Model::init(small_arch(2), 7);

  TrainConfig cfg;
  cfg.learning_rate = 2e-3;
  cfg.batch_size = 16;
  cfg.epochs = 200;
  cfg.select_best_val = false;
  cfg.seed = 3;

  const double before = trajlab::dataset_loss(init, samples, cfg.loss_variant);
  const trajlab::TrainResult result = trajlab::train(init, cfg, samples, samples);
  CHECK(result.step_losses.size() == 200);
  const double after =
    trajlab::dataset_loss(result.checkpoint.model, samples, cfg.loss_variant);
  CHECK(after < 0.1 * before);
}

TEST_CASE("training is bitwise deterministic in config and seed")
{
  const Dataset ds = make_dataset({1.0, 1.0, 0.0, 0.0}, 12, 21);
  const std::vector<TrainSample> samples = prepare(ds);
  const Model init = Model::init(small_arch(2), 9);

  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 4;
  cfg.epochs = 3;
  cfg.seed = 17;

  const trajlab::TrainResult a = trajlab::train(init, cfg, samples);
  const trajlab::TrainResult b = trajlab::train(init, cfg, samples);
  CHECK(
    trajlab::checkpoint_to_bytes(a.checkpoint) == trajlab::checkpoint_to_bytes(b.checkpoint));
  CHECK(a.step_losses == b.step_losses);
  CHECK(a.best_epoch == b.best_epoch);

  TrainConfig other = cfg;
  other.seed = 18;
  const trajlab::TrainResult c = trajlab::train(init, other, samples);
  CHECK(a.step_losses != c.step_losses);
}

TEST_CASE("the loss variants coincide bitwise on straight-only data")
{
  const Dataset ds = make_dataset({1.0, 0.0, 0.0, 0.0}, 12, 31);
  const std::vector<TrainSample> samples = prepare(ds);
  const Model init = Model::init(small_arch(2), 13);

  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 4;
  cfg.epochs = 4;
  cfg.seed = 5;
  const trajlab::TrainResult mtp = trajlab::train(init, cfg, samples);

  TrainConfig scaled_cfg = cfg;
  scaled_cfg.loss_variant = LossVariant::kAngleScaled;
  const trajlab::TrainResult scaled = trajlab::train(init, scaled_cfg, samples);

  CHECK(mtp.step_losses == scaled.step_losses);
  CHECK(
    trajlab::checkpoint_to_bytes(mtp.checkpoint) ==
    trajlab::checkpoint_to_bytes(scaled.checkpoint));
}

TEST_CASE("the angle penalty scales turning losses and their slopes")
{
  const Dataset ds = make_dataset({0.0, 1.0, 0.0, 0.0}, 3, 41);
  const std::vector<TrainSample> samples = prepare(ds);
  const Model model = Model::init(small_arch(2), 19);

  const auto base = trajlab::sample_losses(model, samples, LossVariant::kMtp);
  const auto scaled = trajlab::sample_losses(model, samples, LossVariant::kAngleScaled);
  REQUIRE(base.size() == samples.size());
  REQUIRE(scaled.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double penalty = trajlab::angle_penalty(samples[i].gt);
    CHECK(scaled[i].penalty == doctest::Approx(penalty).epsilon(1e-12));
    CHECK(scaled[i].total == doctest::Approx(penalty * base[i].total).epsilon(1e-12));
    CHECK(scaled[i].winner_index == base[i].winner_index);
  }

  // Finite differences along a few coordinates: the scaled loss slope is
  // the base slope times the sample's penalty, since the penalty does not
  // depend on the parameters.
  const std::vector<TrainSample> one = {samples[0]};
  const double penalty = trajlab::angle_penalty(one[0].gt);
  CHECK(penalty > 1.0);
  std::vector<double> flat = model.flatten();
  trajlab::Rng rng(101);
  const double h = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 12 && checked < 4; ++trial) {
    const std::size_t j = static_cast<std::size_t>(
      rng.uniform(0.0, static_cast<double>(flat.size()) - 0.5));
    Model plus = model;
    Model minus = model;
    std::vector<double> fplus = flat;
    std::vector<double> fminus = flat;
    fplus[j] += h;
    fminus[j] -= h;
    plus.unflatten(fplus);
    minus.unflatten(fminus);
    const double base_slope =
      (trajlab::dataset_loss(plus, one, LossVariant::kMtp) -
       trajlab::dataset_loss(minus, one, LossVariant::kMtp)) /
      (2.0 * h);
    const double scaled_slope =
      (trajlab::dataset_loss(plus, one, LossVariant::kAngleScaled) -
       trajlab::dataset_loss(minus, one, LossVariant::kAngleScaled)) /
      (2.0 * h);
    if (std::abs(base_slope) < 1e-7) {
      continue;
    }
    CHECK(scaled_slope / base_slope == doctest::Approx(penalty).epsilon(1e-5));
    ++checked;
  }
  CHECK(checked >= 1);
}

TEST_CASE("best-validation selection picks the lowest logged loss")
{
  const Dataset ds = make_dataset({1.0, 1.0, 1.0, 1.0}, 20, 51);
  const std::vector<TrainSample> samples = prepare(ds);
  const Model init = Model::init(small_arch(2), 23);

  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 8;
  cfg.epochs = 6;
  cfg.seed = 29;
  cfg.val_fraction = 0.25;

  const trajlab::TrainResult result = trajlab::train(init, cfg, samples);
  REQUIRE(result.epochs.size() == 6);
  double lowest = std::numeric_limits<double>::infinity();
  int lowest_epoch = 0;
  for (const auto & log : result.epochs) {
    if (log.val_loss < lowest) {
      lowest = log.val_loss;
      lowest_epoch = log.epoch;
    }
  }
  CHECK(result.checkpoint.best_validation);
  CHECK(result.checkpoint.validation_loss == lowest);
  CHECK(result.best_epoch == lowest_epoch);
  CHECK(result.checkpoint.epoch == lowest_epoch);
}

TEST_CASE("resuming from a checkpoint matches uninterrupted training")
{
  const Dataset ds = make_dataset({1.0, 1.0, 0.0, 0.0}, 12, 61);
  const std::vector<TrainSample> samples = prepare(ds);
  const Model init = Model::init(small_arch(2), 31);

  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 4;
  cfg.epochs = 4;
  cfg.seed = 37;
  cfg.select_best_val = false;

  const trajlab::TrainResult full = trajlab::train(init, cfg, samples, samples);

  TrainConfig first_leg = cfg;
  first_leg.epochs = 2;
  const trajlab::TrainResult leg1 = trajlab::train(init, first_leg, samples, samples);
  CHECK(leg1.checkpoint.epoch == 2);
  const trajlab::TrainResult leg2 =
    trajlab::train(init, cfg, samples, samples, &leg1.checkpoint);

  CHECK(leg2.step_losses.size() == full.step_losses.size() - leg1.step_losses.size());
  for (std::size_t i = 0; i < leg2.step_losses.size(); ++i) {
    CHECK(leg2.step_losses[i] == full.step_losses[i + leg1.step_losses.size()]);
  }
  CHECK(
    trajlab::checkpoint_to_bytes(leg2.checkpoint) ==
    trajlab::checkpoint_to_bytes(full.checkpoint));
}

TEST_CASE("a saved model evaluates identically after reload")
{
  const Dataset ds = make_dataset({1.0, 1.0, 1.0, 1.0}, 10, 71);
  const std::vector<TrainSample> samples = prepare(ds);
  const std::vector<trajlab::Mask> masks = trajlab::prepare_masks(ds, small_raster());
  const Model init = Model::init(small_arch(2), 41);

  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 5;
  cfg.epochs = 2;
  cfg.seed = 43;
  const trajlab::TrainResult result = trajlab::train(init, cfg, samples, samples);

  const trajlab::MetricsReport before = trajlab::evaluate(
    result.checkpoint.model, samples, masks, small_raster(), {5, 10});

  const std::string path =
    (std::filesystem::temp_directory_path() / "tl_train_reload.ckpt").string();
  trajlab::save_checkpoint(path, result.checkpoint);
  const Checkpoint loaded = trajlab::load_checkpoint(path);
  std::remove(path.c_str());

  const trajlab::MetricsReport after =
    trajlab::evaluate(loaded.model, samples, masks, small_raster(), {5, 10});
  CHECK(before.min_ade == after.min_ade);
  CHECK(before.min_fde == after.min_fde);
  CHECK(before.miss_rate == after.miss_rate);
  CHECK(before.off_road_rate == after.off_road_rate);
  CHECK(before.sample_count == after.sample_count);
}

TEST_CASE("corrupt ground truth aborts with a numeric error")
{
  const Dataset ds = make_dataset({1.0, 0.0, 0.0, 0.0}, 6, 81);
  std::vector<TrainSample> samples = prepare(ds);
  samples[0].gt[0].x = std::numeric_limits<double>::quiet_NaN();
  const Model init = Model::init(small_arch(2), 47);

  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 6;
  cfg.epochs = 1;
  cfg.seed = 53;

  bool threw = false;
  try {
    trajlab::train(init, cfg, samples, samples);
  } catch (const trajlab::NumericError & e) {
    threw = true;
    const std::string what = e.what();
    CHECK(what.find("epoch") != std::string::npos);
    CHECK(what.find("batch") != std::string::npos);
  }
  CHECK(threw);
}
