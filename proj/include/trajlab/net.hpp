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

#ifndef TRAJLAB__NET_HPP_
#define TRAJLAB__NET_HPP_

/// \file
/// Multi-backbone trajectory prediction model.
///
/// N small convnets each consume one raster layer; a kinematics-conditioned
/// head per backbone emits K trajectory hypotheses with confidences; all
/// N*K hypotheses are pooled into a token set and fused by set attention
/// (one self-attention block, then pooling by M learned seeds) into M
/// output modes.  Everything runs on the autodiff tape so training and the
/// gradient checks share one code path.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trajlab/ad.hpp"
#include "trajlab/geometry.hpp"
#include "trajlab/raster.hpp"

namespace trajlab
{

struct ArchConfig
{
  int raster_size = 64;         ///< input side length, pixels
  int horizon_steps = 12;       ///< T
  int backbones = 4;            ///< N, one per raster layer
  int hypotheses_per_head = 3;  ///< K
  int modes = 3;                ///< M fused output modes = attention seed count
  std::vector<int> conv_channels{8, 16, 32};
  int head_hidden = 64;
  int token_dim = 64;  ///< attention width
  int attention_heads = 1;
  int id_embed_dim = 8;
  bool use_backbone_id = true;  ///< append a learned backbone-id embedding to each token
  Activation activation = Activation::kTanh;
  double traj_scale = 10.0;  ///< decoder outputs are multiplied by this to reach meters

  int feature_dim() const { return conv_channels.back(); }
  int mode_dim() const { return 2 * horizon_steps + 1; }  ///< flat trajectory + logit
  int token_in_dim() const
  {
    return 2 * horizon_steps + 1 + (use_backbone_id ? id_embed_dim : 0);
  }
  void validate() const;  // throws ConfigError
};

/// One trajectory hypothesis in the agent frame, meters.
struct Hypothesis
{
  std::vector<Vec2> trajectory;
  double confidence_logit = 0.0;
};

/// K hypotheses from one head plus their softmax confidences.
struct HypothesisSet
{
  std::vector<Hypothesis> hypotheses;
  std::vector<double> confidences;
};

/// M fused modes with confidences summing to one.
struct Prediction
{
  std::vector<std::vector<Vec2>> trajectories;
  std::vector<double> confidences;
};

struct ModelOutput
{
  Prediction prediction;
  std::vector<HypothesisSet> per_backbone;
};

/// All learnable tensors, named and kept in a fixed order so flattening,
/// checkpoints, and optimizer state stay aligned.
struct Model
{
  ArchConfig cfg;
  std::vector<std::pair<std::string, Tensor>> params;

  static Model init(const ArchConfig & cfg, std::uint64_t seed);

  const Tensor & param(const std::string & name) const;
  Tensor & param(const std::string & name);
  std::size_t param_count() const;
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double> & flat);
};

/// Binds a model's parameters into a graph as input nodes (once) and
/// builds forward passes over them.  All samples in a batch share the
/// same parameter nodes, so gradients accumulate deterministically.
class ModelGraph
{
public:
  ModelGraph(Graph & graph, const Model & model);

  struct Forward
  {
    NodeId fused_traj = -1;              ///< M x 2T, meters
    NodeId fused_conf = -1;              ///< 1 x M, softmax
    std::vector<NodeId> head_traj;       ///< per backbone: K x 2T, meters
    std::vector<NodeId> head_logits;     ///< per backbone: 1 x K
    std::vector<NodeId> head_conf;       ///< per backbone: 1 x K, softmax
  };

  /// layer_rgbs: one 3 x (S*S) tensor per backbone.
  Forward forward(
    const std::vector<Tensor> & layer_rgbs, const std::array<double, 3> & kinematics);

  /// One backbone over a 3 x (S*S) grid node, giving a 1 x F feature row.
  NodeId backbone_node(int backbone, NodeId grid);

  struct HeadOut
  {
    std::vector<NodeId> traj_rows;  ///< K rows of 1 x 2T, meters
    NodeId logits = -1;             ///< 1 x K
    NodeId conf = -1;               ///< 1 x K, softmax
  };
  /// Hypothesis head over a 1 x F feature row and a 1 x 3 kinematics row.
  HeadOut head_node(int backbone, NodeId feature, NodeId kin);

  /// Fusion alone, from explicit token rows.  Each entry is a 1 x (2T+1)
  /// node [flat trajectory, confidence] plus the backbone index used for
  /// the id embedding.  Exposed so permutation and duplication behavior
  /// can be exercised directly.
  struct FusionOut
  {
    NodeId traj = -1;  ///< M x 2T
    NodeId conf = -1;  ///< 1 x M
  };
  FusionOut fuse_token_rows(const std::vector<std::pair<NodeId, int>> & tokens);

  NodeId param_node(const std::string & name) const;
  const std::vector<NodeId> & param_nodes() const { return param_ids_; }

  /// Writes the accumulated parameter gradients (post backward()) into a
  /// flat vector aligned with Model::flatten().
  std::vector<double> flat_param_grads() const;

private:
  NodeId mab(const std::string & prefix, NodeId xq, NodeId xkv);

  Graph * graph_;
  const Model * model_;
  std::vector<NodeId> param_ids_;
};

/// Converts a raster grid to the 3 x (S*S) channel-major tensor a
/// backbone consumes.
Tensor grid_to_tensor(const Grid & grid);

/// Value-level single-backbone forward: returns the F-dim feature vector.
std::vector<double> backbone_forward(const Model & model, int backbone, const Grid & grid);

/// Value-level head forward over a precomputed feature vector.
HypothesisSet head_forward(
  const Model & model, int backbone, const std::vector<double> & feature,
  const std::array<double, 3> & kinematics);

/// Value-level fusion of per-backbone hypothesis sets (set i uses
/// backbone-id i).  Throws ConfigError when trajectory lengths disagree.
Prediction fuse_hypotheses(const Model & model, const std::vector<HypothesisSet> & sets);

/// Fusion from an explicit pooled token list, for permutation and
/// duplication checks.  Each token is (flat trajectory + confidence,
/// backbone index).
Prediction fuse_token_values(
  const Model & model, const std::vector<std::pair<std::vector<double>, int>> & tokens);

/// Full forward: stack layer count must equal the configured backbone
/// count (ConfigError otherwise).
ModelOutput model_forward(
  const Model & model, const RasterStack & stack, const std::array<double, 3> & kinematics);

}  // namespace trajlab

#endif  // TRAJLAB__NET_HPP_
