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
#include <vector>

#include "trajlab/error.hpp"
#include "trajlab/loss.hpp"
#include "trajlab/rng.hpp"

namespace
{

using trajlab::Vec2;

std::vector<Vec2> ray(double x, double y)
{
  return {Vec2{0.5 * x, 0.5 * y}, Vec2{x, y}};
}

}  // namespace

TEST_CASE("angle between final points covers the quadrant landmarks")
{
  const auto straight = trajlab::angle_between_deg(ray(4.0, 0.0), ray(9.0, 0.0));
  REQUIRE(straight.has_value());
  CHECK(*straight == doctest::Approx(0.0).epsilon(1e-12));

  const auto right = trajlab::angle_between_deg(ray(0.0, 2.0), ray(3.0, 0.0));
  REQUIRE(right.has_value());
  CHECK(*right == doctest::Approx(90.0).epsilon(1e-12));

  const auto diag = trajlab::angle_between_deg(ray(1.0, 1.0), ray(1.0, 0.0));
  REQUIRE(diag.has_value());
  CHECK(*diag == doctest::Approx(45.0).epsilon(1e-12));

  const auto flipped = trajlab::angle_between_deg(ray(-1.0, 0.0), ray(1.0, 0.0));
  REQUIRE(flipped.has_value());
  CHECK(*flipped == doctest::Approx(180.0).epsilon(1e-12));
}

TEST_CASE("angle is symmetric and scale free")
{
  trajlab::Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    const std::vector<Vec2> a = ray(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
    const std::vector<Vec2> b = ray(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
    if (a.back().norm() < 1e-3 || b.back().norm() < 1e-3) {
      continue;
    }
    const auto ab = trajlab::angle_between_deg(a, b);
    const auto ba = trajlab::angle_between_deg(b, a);
    REQUIRE(ab.has_value());
    REQUIRE(ba.has_value());
    CHECK(*ab == doctest::Approx(*ba).epsilon(1e-12));

    const double s = rng.uniform(0.1, 4.0);
    const std::vector<Vec2> scaled = ray(s * a.back().x, s * a.back().y);
    const auto rescaled = trajlab::angle_between_deg(scaled, b);
    REQUIRE(rescaled.has_value());
    CHECK(*rescaled == doctest::Approx(*ab).epsilon(1e-9));
  }
}

TEST_CASE("degenerate final points yield no angle")
{
  CHECK_FALSE(trajlab::angle_between_deg({}, ray(1.0, 0.0)).has_value());
  CHECK_FALSE(trajlab::angle_between_deg(ray(1.0, 0.0), {}).has_value());
  const std::vector<Vec2> stuck = {Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
  CHECK_FALSE(trajlab::angle_between_deg(stuck, ray(1.0, 0.0)).has_value());
  CHECK_FALSE(trajlab::angle_between_deg(ray(1.0, 0.0), stuck).has_value());
}

TEST_CASE("winner has the least final-point angle")
{
  const double d30 = 30.0 * M_PI / 180.0;
  const double d5 = 5.0 * M_PI / 180.0;
  const std::vector<std::vector<Vec2>> trajectories = {
    ray(std::cos(d30), std::sin(d30)),
    ray(std::cos(d5), std::sin(d5)),
    ray(0.0, 1.0),
  };
  // [DERIVED] angles vs +x gt are 30, 5, 90 degrees; argmin is index 1.
  CHECK(trajlab::select_winner(trajectories, ray(1.0, 0.0)) == 1);
}

TEST_CASE("angle ties go to the lower index")
{
  const double d10 = 10.0 * M_PI / 180.0;
  const std::vector<std::vector<Vec2>> trajectories = {
    ray(std::cos(d10), std::sin(d10)),
    ray(std::cos(d10), -std::sin(d10)),
  };
  // [DERIVED] both hypotheses sit 10 degrees off the gt bearing.
  CHECK(trajlab::select_winner(trajectories, ray(1.0, 0.0)) == 0);
}

TEST_CASE("degenerate ground truth falls back to regression argmin")
{
  const std::vector<Vec2> gt = {Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
  const std::vector<std::vector<Vec2>> trajectories = {
    ray(6.0, 0.0),
    ray(0.5, 0.0),
    ray(3.0, 3.0),
  };
  // [DERIVED] mean distances 2.25, 0.1875, ~1.59; argmin is index 1.
  CHECK(trajlab::select_winner(trajectories, gt) == 1);
  CHECK_THROWS_AS(trajlab::select_winner({}, gt), trajlab::ArgumentError);
}

TEST_CASE("regression loss averages pointwise euclidean distance")
{
  const std::vector<Vec2> gt1 = {Vec2{0.0, 0.0}};
  const std::vector<Vec2> p1 = {Vec2{3.0, 4.0}};
  // [DERIVED] lone 3-4-5 triangle: mean distance 5, mean squared 25.
  CHECK(trajlab::regression_loss(p1, gt1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(trajlab::regression_loss(p1, gt1, true) == doctest::Approx(25.0).epsilon(1e-12));

  const std::vector<Vec2> gt2 = {Vec2{0.0, 0.0}, Vec2{0.0, 0.0}};
  const std::vector<Vec2> p2 = {Vec2{0.0, 1.0}, Vec2{0.0, 3.0}};
  // [DERIVED] (1 + 3) / 2 = 2.
  CHECK(trajlab::regression_loss(p2, gt2) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(trajlab::regression_loss(p1, gt2), trajlab::ArgumentError);
  CHECK_THROWS_AS(trajlab::regression_loss({}, {}), trajlab::ArgumentError);
}

TEST_CASE("classification loss is the negative log confidence of the winner")
{
  CHECK(trajlab::classification_loss({1.0}, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trajlab::classification_loss({0.5, 0.5}, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const std::vector<double> uniform12(12, 1.0 / 12.0);
  CHECK(trajlab::classification_loss(uniform12, 3) == doctest::Approx(std::log(12.0)).epsilon(1e-12));
  // Zero confidence hits the floor instead of producing infinity.
  CHECK(
    trajlab::classification_loss({0.0, 1.0}, 0) ==
    doctest::Approx(-std::log(trajlab::kConfidenceFloor)).epsilon(1e-12));
  CHECK_THROWS_AS(trajlab::classification_loss({0.5, 0.5}, 2), trajlab::ArgumentError);
}

TEST_CASE("base loss adds regression and classification for the winner")
{
  const std::vector<Vec2> gt = ray(5.0, 0.0);

  const trajlab::LossBreakdown perfect = trajlab::mtp_loss({gt}, {1.0}, gt);
  CHECK(perfect.winner_index == 0);
  CHECK(perfect.total == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(perfect.penalty == doctest::Approx(1.0).epsilon(1e-12));

  const double d20 = 20.0 * M_PI / 180.0;
  const std::vector<std::vector<Vec2>> three = {
    gt, ray(std::cos(d20), std::sin(d20)), ray(0.0, 1.0)};
  const std::vector<double> uniform3(3, 1.0 / 3.0);
  const trajlab::LossBreakdown spread = trajlab::mtp_loss(three, uniform3, gt);
  // [DERIVED] winner matches gt exactly, so only -ln(1/3) remains.
  CHECK(spread.winner_index == 0);
  CHECK(spread.regression == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(spread.total == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  const std::vector<Vec2> offset = {
    Vec2{gt[0].x + 3.0, gt[0].y + 4.0}, Vec2{gt[1].x + 3.0, gt[1].y + 4.0}};
  const trajlab::LossBreakdown shifted = trajlab::mtp_loss({offset}, {0.5}, gt);
  // [DERIVED] every step is 5 m off and -ln(0.5) = ln 2.
  CHECK(shifted.regression == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(shifted.classification == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(shifted.total == doctest::Approx(5.0 + std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(trajlab::mtp_loss(three, {0.5, 0.5}, gt), trajlab::ArgumentError);
}

TEST_CASE("angle penalty follows exp of bearing over twenty degrees")
{
  CHECK(trajlab::angle_penalty(ray(10.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
  // [DERIVED] exp(90 / 20) = exp(4.5) = 90.0171313005...
  CHECK(trajlab::angle_penalty(ray(0.0, 10.0)) == doctest::Approx(std::exp(4.5)).epsilon(1e-12));
  CHECK(trajlab::angle_penalty(ray(0.0, -10.0)) == doctest::Approx(std::exp(4.5)).epsilon(1e-12));
  // [DERIVED] exp(45 / 20) = exp(2.25) = 9.4877358363...
  CHECK(trajlab::angle_penalty(ray(10.0, 10.0)) == doctest::Approx(std::exp(2.25)).epsilon(1e-12));
  const std::vector<Vec2> stuck = {Vec2{0.0, 0.0}};
  CHECK(trajlab::angle_penalty(stuck) == doctest::Approx(1.0).epsilon(1e-12));

  // Penalty grows with the bearing magnitude.
  double prev = 0.0;
  for (double deg = 0.0; deg <= 180.0; deg += 15.0) {
    const double rad = deg * M_PI / 180.0;
    const double p = trajlab::angle_penalty(ray(10.0 * std::cos(rad), 10.0 * std::sin(rad)));
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("angle-scaled loss matches the base loss on straight ground truth")
{
  trajlab::Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const std::vector<Vec2> gt = ray(rng.uniform(2.0, 20.0), 0.0);
    std::vector<std::vector<Vec2>> trajectories;
    std::vector<double> confidences;
    for (int k = 0; k < 3; ++k) {
      trajectories.push_back(ray(rng.uniform(-5.0, 20.0), rng.uniform(-5.0, 5.0)));
      confidences.push_back(1.0 / 3.0);
    }
    const trajlab::LossBreakdown base = trajlab::mtp_loss(trajectories, confidences, gt);
    const trajlab::LossBreakdown scaled = trajlab::angle_scaled_loss(trajectories, confidences, gt);
    CHECK(scaled.penalty == 1.0);
    CHECK(scaled.total == base.total);
    CHECK(scaled.winner_index == base.winner_index);
  }
}

TEST_CASE("angle-scaled loss multiplies a hard left turn by exp(4.5)")
{
  const std::vector<Vec2> gt = {Vec2{0.0, 5.0}, Vec2{0.0, 10.0}};
  const std::vector<Vec2> off = {Vec2{2.0, 5.0}, Vec2{2.0, 10.0}};
  const trajlab::LossBreakdown base = trajlab::mtp_loss({off}, {1.0}, gt);
  CHECK(base.total == doctest::Approx(2.0).epsilon(1e-12));
  const trajlab::LossBreakdown scaled = trajlab::angle_scaled_loss({off}, {1.0}, gt);
  // [DERIVED] 2 * exp(4.5) = 180.0342626011...
  CHECK(scaled.total == doctest::Approx(2.0 * std::exp(4.5)).epsilon(1e-12));
  CHECK(scaled.total == doctest::Approx(180.0342626011069).epsilon(1e-10));
}

TEST_CASE("scaled over base ratio equals the penalty and ignores predictions")
{
  trajlab::Rng rng(37);
  for (int i = 0; i < 30; ++i) {
    const std::vector<Vec2> gt = ray(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0));
    if (gt.back().norm() < 0.5) {
      continue;
    }
    std::vector<std::vector<Vec2>> trajectories;
    std::vector<double> confidences;
    for (int k = 0; k < 4; ++k) {
      trajectories.push_back(ray(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)));
      confidences.push_back(0.25);
    }
    const trajlab::LossBreakdown base = trajlab::mtp_loss(trajectories, confidences, gt);
    const trajlab::LossBreakdown scaled = trajlab::angle_scaled_loss(trajectories, confidences, gt);
    const double penalty = trajlab::angle_penalty(gt);
    CHECK(scaled.penalty == doctest::Approx(penalty).epsilon(1e-12));
    if (base.total > 1e-9) {
      CHECK(scaled.total / base.total == doctest::Approx(penalty).epsilon(1e-9));
    }
    // The penalty is a function of the ground truth alone.
    const trajlab::LossBreakdown other =
      trajlab::angle_scaled_loss({trajectories[0]}, {1.0}, gt);
    CHECK(other.penalty == doctest::Approx(penalty).epsilon(1e-12));
  }
}
