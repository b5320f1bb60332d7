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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "trajlab/error.hpp"
#include "trajlab/net.hpp"
#include "trajlab/raster.hpp"
#include "trajlab/rng.hpp"

namespace
{

using trajlab::ArchConfig;
using trajlab::Grid;
using trajlab::HypothesisSet;
using trajlab::Model;
using trajlab::Prediction;
using trajlab::RasterStack;

ArchConfig small_cfg()
{
  ArchConfig cfg;
  cfg.raster_size = 16;
  cfg.horizon_steps = 4;
  cfg.backbones = 3;
  cfg.hypotheses_per_head = 2;
  cfg.modes = 3;
  cfg.conv_channels = {4, 8};
  cfg.head_hidden = 16;
  cfg.token_dim = 16;
  cfg.id_embed_dim = 4;
  return cfg;
}

Grid random_grid(trajlab::Rng & rng, int size)
{
  Grid g = Grid::zeros(size);
  for (double & v : g.rgb) {
    v = rng.uniform(0.0, 1.0);
  }
  return g;
}

RasterStack random_stack(trajlab::Rng & rng, int layers, int size)
{
  RasterStack stack;
  for (int i = 0; i < layers; ++i) {
    stack.specs.push_back(trajlab::LayerSpec{});
    stack.layers.push_back(random_grid(rng, size));
  }
  return stack;
}

double max_abs_diff(const std::vector<trajlab::Vec2> & a, const std::vector<trajlab::Vec2> & b)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i].x - b[i].x));
    worst = std::max(worst, std::abs(a[i].y - b[i].y));
  }
  return worst;
}

}  // namespace

TEST_CASE("zeroed parameters give a zero backbone feature")
{
  const ArchConfig cfg = small_cfg();
  Model model = Model::init(cfg, 3);
  for (auto & [name, tensor] : model.params) {
    std::fill(tensor.v.begin(), tensor.v.end(), 0.0);
  }
  trajlab::Rng rng(5);
  const Grid grid = random_grid(rng, cfg.raster_size);
  const std::vector<double> feature = trajlab::backbone_forward(model, 0, grid);
  REQUIRE(feature.size() == static_cast<std::size_t>(cfg.feature_dim()));
  for (const double v : feature) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("initialization and forward are deterministic in the seed")
{
  const ArchConfig cfg = small_cfg();
  const Model a = Model::init(cfg, 42);
  const Model b = Model::init(cfg, 42);
  const Model c = Model::init(cfg, 43);
  CHECK(a.flatten() == b.flatten());
  CHECK(a.flatten() != c.flatten());

  trajlab::Rng rng(7);
  const RasterStack stack = random_stack(rng, cfg.backbones, cfg.raster_size);
  const std::array<double, 3> kin = {5.0, 0.2, -0.1};
  const trajlab::ModelOutput out1 = trajlab::model_forward(a, stack, kin);
  const trajlab::ModelOutput out2 = trajlab::model_forward(b, stack, kin);
  REQUIRE(out1.prediction.trajectories.size() == out2.prediction.trajectories.size());
  CHECK(out1.prediction.confidences == out2.prediction.confidences);
  for (std::size_t m = 0; m < out1.prediction.trajectories.size(); ++m) {
    CHECK(max_abs_diff(out1.prediction.trajectories[m], out2.prediction.trajectories[m]) == 0.0);
  }
}

TEST_CASE("backbone features scale linearly under identity activation")
{
  ArchConfig cfg = small_cfg();
  cfg.activation = trajlab::Activation::kIdentity;
  const Model model = Model::init(cfg, 11);
  trajlab::Rng rng(13);
  Grid grid = random_grid(rng, cfg.raster_size);
  const std::vector<double> f1 = trajlab::backbone_forward(model, 1, grid);
  for (double & v : grid.rgb) {
    v *= 2.0;
  }
  const std::vector<double> f2 = trajlab::backbone_forward(model, 1, grid);
  // Init biases are zero, so the conv stack is linear in the input.
  REQUIRE(f1.size() == f2.size());
  for (std::size_t i = 0; i < f1.size(); ++i) {
    CHECK(f2[i] == doctest::Approx(2.0 * f1[i]).epsilon(1e-9));
  }
}

TEST_CASE("head confidences are a softmax over hypothesis logits")
{
  const ArchConfig cfg = small_cfg();
  const Model model = Model::init(cfg, 17);
  trajlab::Rng rng(19);
  const Grid grid = random_grid(rng, cfg.raster_size);
  const std::vector<double> feature = trajlab::backbone_forward(model, 0, grid);
  const HypothesisSet set = trajlab::head_forward(model, 0, feature, {4.0, 0.0, 0.0});
  REQUIRE(set.hypotheses.size() == static_cast<std::size_t>(cfg.hypotheses_per_head));
  REQUIRE(set.confidences.size() == set.hypotheses.size());
  double total = 0.0;
  for (std::size_t k = 0; k < set.confidences.size(); ++k) {
    CHECK(set.confidences[k] > 0.0);
    CHECK(set.confidences[k] < 1.0);
    total += set.confidences[k];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // [DERIVED] softmax(ln 1, ln 2, ln 3) = (1/6, 1/3, 1/2); verify against
  // the same formula applied to the reported logits.
  std::vector<double> expect;
  double norm = 0.0;
  for (const auto & h : set.hypotheses) {
    expect.push_back(std::exp(h.confidence_logit));
    norm += expect.back();
  }
  for (std::size_t k = 0; k < expect.size(); ++k) {
    CHECK(set.confidences[k] == doctest::Approx(expect[k] / norm).epsilon(1e-9));
  }
}

TEST_CASE("shapes follow the configuration")
{
  ArchConfig cfg = small_cfg();
  cfg.horizon_steps = 12;
  cfg.hypotheses_per_head = 12;
  cfg.modes = 12;
  const Model model = Model::init(cfg, 23);
  trajlab::Rng rng(29);
  const RasterStack stack = random_stack(rng, cfg.backbones, cfg.raster_size);
  const trajlab::ModelOutput out = trajlab::model_forward(model, stack, {6.0, 0.5, 0.0});
  CHECK(out.prediction.trajectories.size() == 12);
  CHECK(out.prediction.confidences.size() == 12);
  for (const auto & traj : out.prediction.trajectories) {
    CHECK(traj.size() == 12);
  }
  REQUIRE(out.per_backbone.size() == static_cast<std::size_t>(cfg.backbones));
  for (const auto & set : out.per_backbone) {
    CHECK(set.hypotheses.size() == 12);
    for (const auto & h : set.hypotheses) {
      CHECK(h.trajectory.size() == 12);
    }
  }
}

TEST_CASE("fused confidences form a distribution over many random forwards")
{
  const ArchConfig cfg = small_cfg();
  trajlab::Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Model model = Model::init(cfg, 1000 + static_cast<std::uint64_t>(trial));
    const RasterStack stack = random_stack(rng, cfg.backbones, cfg.raster_size);
    const std::array<double, 3> kin = {
      rng.uniform(0.0, 15.0), rng.uniform(-2.0, 2.0), rng.uniform(-0.5, 0.5)};
    const Prediction pred = trajlab::model_forward(model, stack, kin).prediction;
    double total = 0.0;
    for (const double c : pred.confidences) {
      CHECK(c > 0.0);
      CHECK(c < 1.0);
      total += c;
    }
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("fusion is invariant to token order")
{
  const ArchConfig cfg = small_cfg();
  const Model model = Model::init(cfg, 37);
  trajlab::Rng rng(41);
  const int t2 = 2 * cfg.horizon_steps;
  std::vector<std::pair<std::vector<double>, int>> tokens;
  for (int b = 0; b < cfg.backbones; ++b) {
    for (int k = 0; k < cfg.hypotheses_per_head; ++k) {
      std::vector<double> row;
      for (int i = 0; i < t2; ++i) {
        row.push_back(rng.uniform(-10.0, 10.0));
      }
      row.push_back(rng.uniform(0.05, 0.9));
      tokens.emplace_back(row, b);
    }
  }
  const Prediction base = trajlab::fuse_token_values(model, tokens);

  trajlab::Rng perm_rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<std::vector<double>, int>> shuffled = tokens;
    perm_rng.shuffle(shuffled);
    const Prediction out = trajlab::fuse_token_values(model, shuffled);
    REQUIRE(out.trajectories.size() == base.trajectories.size());
    for (std::size_t m = 0; m < base.trajectories.size(); ++m) {
      CHECK(
        max_abs_diff(out.trajectories[m], base.trajectories[m]) < 1e-5);
      CHECK(std::abs(out.confidences[m] - base.confidences[m]) < 1e-5);
    }
  }
}

TEST_CASE("duplicating every token leaves the fused output nearly unchanged")
{
  // Softmax attention averages over keys, so a doubled token multiset
  // produces the same attention readout up to roundoff.
  const ArchConfig cfg = small_cfg();
  const Model model = Model::init(cfg, 47);
  trajlab::Rng rng(53);
  const int t2 = 2 * cfg.horizon_steps;
  std::vector<std::pair<std::vector<double>, int>> tokens;
  for (int b = 0; b < cfg.backbones; ++b) {
    std::vector<double> row;
    for (int i = 0; i < t2; ++i) {
      row.push_back(rng.uniform(-8.0, 8.0));
    }
    row.push_back(rng.uniform(0.1, 0.9));
    tokens.emplace_back(row, b);
  }
  std::vector<std::pair<std::vector<double>, int>> doubled = tokens;
  doubled.insert(doubled.end(), tokens.begin(), tokens.end());

  const Prediction once = trajlab::fuse_token_values(model, tokens);
  const Prediction twice = trajlab::fuse_token_values(model, doubled);
  REQUIRE(once.trajectories.size() == twice.trajectories.size());
  for (std::size_t m = 0; m < once.trajectories.size(); ++m) {
    CHECK(max_abs_diff(once.trajectories[m], twice.trajectories[m]) < 1e-9);
    CHECK(std::abs(once.confidences[m] - twice.confidences[m]) < 1e-9);
  }
}

TEST_CASE("single backbone with matching mode count still normalizes")
{
  ArchConfig cfg = small_cfg();
  cfg.backbones = 1;
  cfg.hypotheses_per_head = 3;
  cfg.modes = 3;
  const Model model = Model::init(cfg, 59);
  trajlab::Rng rng(61);
  const RasterStack stack = random_stack(rng, 1, cfg.raster_size);
  const Prediction pred = trajlab::model_forward(model, stack, {3.0, 0.0, 0.0}).prediction;
  REQUIRE(pred.confidences.size() == 3);
  const double total =
    std::accumulate(pred.confidences.begin(), pred.confidences.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mismatched layer count or horizons are rejected")
{
  const ArchConfig cfg = small_cfg();
  const Model model = Model::init(cfg, 67);
  trajlab::Rng rng(71);
  const RasterStack two = random_stack(rng, 2, cfg.raster_size);
  CHECK_THROWS_AS(
    trajlab::model_forward(model, two, {1.0, 0.0, 0.0}), trajlab::ConfigError);

  std::vector<HypothesisSet> sets(static_cast<std::size_t>(cfg.backbones));
  for (std::size_t b = 0; b < sets.size(); ++b) {
    for (int k = 0; k < cfg.hypotheses_per_head; ++k) {
      trajlab::Hypothesis h;
      const int len = (b == 0 && k == 0) ? cfg.horizon_steps - 1 : cfg.horizon_steps;
      h.trajectory.assign(static_cast<std::size_t>(len), trajlab::Vec2{1.0, 0.0});
      sets[b].hypotheses.push_back(h);
      sets[b].confidences.push_back(1.0 / cfg.hypotheses_per_head);
    }
  }
  CHECK_THROWS_AS(trajlab::fuse_hypotheses(model, sets), trajlab::ConfigError);
}

TEST_CASE("invalid architecture configurations are rejected")
{
  ArchConfig cfg = small_cfg();
  cfg.backbones = 0;
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
  cfg = small_cfg();
  cfg.conv_channels.clear();
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
  cfg = small_cfg();
  cfg.traj_scale = 0.0;
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
  cfg = small_cfg();
  cfg.modes = 0;
  CHECK_THROWS_AS(cfg.validate(), trajlab::ConfigError);
}
