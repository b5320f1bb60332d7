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

#include "trajlab/net.hpp"

#include <cmath>
#include <cstdio>

#include "trajlab/error.hpp"
#include "trajlab/rng.hpp"

namespace trajlab
{
namespace
{

std::string bb(int n, const char * rest)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "backbone%d/%s", n, rest);
  return buf;
}

std::string hd(int n, const char * rest)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "head%d/%s", n, rest);
  return buf;
}

}  // namespace

void ArchConfig::validate() const
{
  if (raster_size < 8) {
    throw ConfigError("raster_size must be >= 8");
  }
  if (horizon_steps < 1) {
    throw ConfigError("horizon_steps must be >= 1");
  }
  if (backbones < 1) {
    throw ConfigError("backbones must be >= 1");
  }
  if (hypotheses_per_head < 1 || modes < 1) {
    throw ConfigError("hypothesis and mode counts must be >= 1");
  }
  if (conv_channels.empty()) {
    throw ConfigError("conv_channels must not be empty");
  }
  for (int c : conv_channels) {
    if (c < 1) {
      throw ConfigError("conv channel widths must be positive");
    }
  }
  int side = raster_size;
  for (std::size_t i = 0; i < conv_channels.size(); ++i) {
    side = (side + 2 - 3) / 2 + 1;
    if (side < 1) {
      throw ConfigError("raster_size too small for the conv stack");
    }
  }
  if (head_hidden < 1) {
    throw ConfigError("head_hidden must be >= 1");
  }
  if (attention_heads < 1 || token_dim < 1 || token_dim % attention_heads != 0) {
    throw ConfigError("token_dim must be a positive multiple of attention_heads");
  }
  if (use_backbone_id && id_embed_dim < 1) {
    throw ConfigError("id_embed_dim must be >= 1 when backbone ids are embedded");
  }
  if (!(traj_scale > 0.0) || !std::isfinite(traj_scale)) {
    throw ConfigError("traj_scale must be positive and finite");
  }
}

Model Model::init(const ArchConfig & cfg, std::uint64_t seed)
{
  cfg.validate();
  Model m;
  m.cfg = cfg;
  Rng rng(seed);

  auto weight = [&rng](int rows, int cols, int fan_in) {
    Tensor t = Tensor::zeros(rows, cols);
    const double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double & v : t.v) {
      v = rng.uniform(-r, r);
    }
    return t;
  };
  auto push = [&m](const std::string & name, Tensor t) {
    m.params.emplace_back(name, std::move(t));
  };

  const int md = cfg.mode_dim();
  for (int n = 0; n < cfg.backbones; ++n) {
    int in_c = 3;
    for (std::size_t i = 0; i < cfg.conv_channels.size(); ++i) {
      const int out_c = cfg.conv_channels[i];
      char tag[32];
      std::snprintf(tag, sizeof(tag), "conv%zu/w", i);
      push(bb(n, tag), weight(out_c, in_c * 9, in_c * 9));
      std::snprintf(tag, sizeof(tag), "conv%zu/b", i);
      push(bb(n, tag), Tensor::zeros(out_c, 1));
      in_c = out_c;
    }
  }
  const int head_in = cfg.feature_dim() + 3;
  for (int n = 0; n < cfg.backbones; ++n) {
    push(hd(n, "fc1/w"), weight(head_in, cfg.head_hidden, head_in));
    push(hd(n, "fc1/b"), Tensor::zeros(1, cfg.head_hidden));
    push(hd(n, "fc2/w"), weight(cfg.head_hidden, cfg.hypotheses_per_head * md, cfg.head_hidden));
    push(hd(n, "fc2/b"), Tensor::zeros(1, cfg.hypotheses_per_head * md));
  }

  const int d = cfg.token_dim;
  push("fusion/fc_in/w", weight(cfg.token_in_dim(), d, cfg.token_in_dim()));
  push("fusion/fc_in/b", Tensor::zeros(1, d));
  for (const char * block : {"sab", "pma"}) {
    for (const char * w : {"wq", "wk", "wv", "wo"}) {
      push(std::string("fusion/") + block + "/" + w, weight(d, d, d));
    }
    for (const char * b : {"bq", "bk", "bv", "bo"}) {
      push(std::string("fusion/") + block + "/" + b, Tensor::zeros(1, d));
    }
  }
  push("fusion/seeds", weight(cfg.modes, d, d));
  if (cfg.use_backbone_id) {
    push("fusion/id_embed", weight(cfg.backbones, cfg.id_embed_dim, cfg.id_embed_dim));
  }
  push("fusion/dec/w", weight(d, md, d));
  push("fusion/dec/b", Tensor::zeros(1, md));
  return m;
}

const Tensor & Model::param(const std::string & name) const
{
  for (const auto & [n, t] : params) {
    if (n == name) {
      return t;
    }
  }
  throw ArgumentError("no parameter named " + name);
}

Tensor & Model::param(const std::string & name)
{
  for (auto & [n, t] : params) {
    if (n == name) {
      return t;
    }
  }
  throw ArgumentError("no parameter named " + name);
}

std::size_t Model::param_count() const
{
  std::size_t total = 0;
  for (const auto & [n, t] : params) {
    total += t.size();
  }
  return total;
}

std::vector<double> Model::flatten() const
{
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const auto & [n, t] : params) {
    flat.insert(flat.end(), t.v.begin(), t.v.end());
  }
  return flat;
}

void Model::unflatten(const std::vector<double> & flat)
{
  if (flat.size() != param_count()) {
    throw ArgumentError("unflatten: size mismatch");
  }
  std::size_t offset = 0;
  for (auto & [n, t] : params) {
    std::copy(flat.begin() + offset, flat.begin() + offset + t.size(), t.v.begin());
    offset += t.size();
  }
}

ModelGraph::ModelGraph(Graph & graph, const Model & model) : graph_(&graph), model_(&model)
{
  param_ids_.reserve(model.params.size());
  for (const auto & [name, tensor] : model.params) {
    param_ids_.push_back(graph_->input(tensor));
  }
}

NodeId ModelGraph::param_node(const std::string & name) const
{
  for (std::size_t i = 0; i < model_->params.size(); ++i) {
    if (model_->params[i].first == name) {
      return param_ids_[i];
    }
  }
  throw ArgumentError("no parameter named " + name);
}

std::vector<double> ModelGraph::flat_param_grads() const
{
  std::vector<double> flat;
  flat.reserve(model_->param_count());
  for (NodeId id : param_ids_) {
    const Tensor & g = graph_->grad(id);
    flat.insert(flat.end(), g.v.begin(), g.v.end());
  }
  return flat;
}

NodeId ModelGraph::backbone_node(int backbone, NodeId grid)
{
  const ArchConfig & cfg = model_->cfg;
  if (backbone < 0 || backbone >= cfg.backbones) {
    throw ConfigError("backbone index out of range");
  }
  const Tensor & in = graph_->value(grid);
  if (in.rows != 3 || in.cols != cfg.raster_size * cfg.raster_size) {
    throw ConfigError("backbone input shape does not match the configured raster size");
  }
  Graph & g = *graph_;
  NodeId x = grid;
  int side = cfg.raster_size;
  int in_c = 3;
  for (std::size_t i = 0; i < cfg.conv_channels.size(); ++i) {
    Conv2dShape shape;
    shape.in_c = in_c;
    shape.h = side;
    shape.w = side;
    shape.out_c = cfg.conv_channels[i];
    char wtag[32];
    char btag[32];
    std::snprintf(wtag, sizeof(wtag), "conv%zu/w", i);
    std::snprintf(btag, sizeof(btag), "conv%zu/b", i);
    x = g.conv2d(x, param_node(bb(backbone, wtag)), param_node(bb(backbone, btag)), shape);
    x = g.activation(x, cfg.activation);
    side = shape.out_h();
    in_c = shape.out_c;
  }
  return g.transpose(g.global_avg_pool(x));  // 1 x F
}

ModelGraph::HeadOut ModelGraph::head_node(int backbone, NodeId feature, NodeId kin)
{
  const ArchConfig & cfg = model_->cfg;
  Graph & g = *graph_;
  const int md = cfg.mode_dim();
  const int tsteps = 2 * cfg.horizon_steps;

  NodeId x = g.concat_cols({feature, kin});
  x = g.activation(
    g.affine(x, param_node(hd(backbone, "fc1/w")), param_node(hd(backbone, "fc1/b"))),
    cfg.activation);
  NodeId out = g.affine(x, param_node(hd(backbone, "fc2/w")), param_node(hd(backbone, "fc2/b")));

  HeadOut head;
  std::vector<NodeId> logit_picks;
  for (int k = 0; k < cfg.hypotheses_per_head; ++k) {
    head.traj_rows.push_back(
      g.scale(g.slice_cols(out, k * md, k * md + tsteps), cfg.traj_scale));
    logit_picks.push_back(g.pick(out, 0, k * md + tsteps));
  }
  head.logits = g.concat_cols(logit_picks);   // 1 x K
  head.conf = g.softmax_rows(head.logits);    // 1 x K
  return head;
}

NodeId ModelGraph::mab(const std::string & prefix, NodeId xq, NodeId xkv)
{
  const ArchConfig & cfg = model_->cfg;
  Graph & g = *graph_;
  const int d = cfg.token_dim;
  const int heads = cfg.attention_heads;
  const int dh = d / heads;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  NodeId q = g.affine(xq, param_node(prefix + "/wq"), param_node(prefix + "/bq"));
  NodeId k = g.affine(xkv, param_node(prefix + "/wk"), param_node(prefix + "/bk"));
  NodeId v = g.affine(xkv, param_node(prefix + "/wv"), param_node(prefix + "/bv"));

  std::vector<NodeId> head_outs;
  for (int i = 0; i < heads; ++i) {
    NodeId qi = heads == 1 ? q : g.slice_cols(q, i * dh, (i + 1) * dh);
    NodeId ki = heads == 1 ? k : g.slice_cols(k, i * dh, (i + 1) * dh);
    NodeId vi = heads == 1 ? v : g.slice_cols(v, i * dh, (i + 1) * dh);
    NodeId att = g.softmax_rows(g.scale(g.matmul_nt(qi, ki), inv_sqrt_d));
    head_outs.push_back(g.add(qi, g.matmul(att, vi)));
  }
  NodeId o = heads == 1 ? head_outs[0] : g.concat_cols(head_outs);
  NodeId ff = g.activation(
    g.affine(o, param_node(prefix + "/wo"), param_node(prefix + "/bo")), cfg.activation);
  return g.add(o, ff);
}

ModelGraph::FusionOut ModelGraph::fuse_token_rows(
  const std::vector<std::pair<NodeId, int>> & tokens)
{
  const ArchConfig & cfg = model_->cfg;
  Graph & g = *graph_;
  if (tokens.empty()) {
    throw ArgumentError("fusion requires at least one token");
  }
  const int tsteps = 2 * cfg.horizon_steps;

  std::vector<NodeId> rows;
  rows.reserve(tokens.size());
  for (const auto & [row, backbone] : tokens) {
    const Tensor & t = g.value(row);
    if (t.rows != 1 || t.cols != tsteps + 1) {
      throw ConfigError("fusion token has the wrong trajectory length");
    }
    if (cfg.use_backbone_id) {
      if (backbone < 0 || backbone >= cfg.backbones) {
        throw ConfigError("fusion token backbone index out of range");
      }
      NodeId emb = g.slice_rows(param_node("fusion/id_embed"), backbone, backbone + 1);
      rows.push_back(g.concat_cols({row, emb}));
    } else {
      rows.push_back(row);
    }
  }

  NodeId x = g.stack_rows(rows);
  x = g.activation(
    g.affine(x, param_node("fusion/fc_in/w"), param_node("fusion/fc_in/b")), cfg.activation);
  x = mab("fusion/sab", x, x);
  NodeId pooled = mab("fusion/pma", param_node("fusion/seeds"), x);
  NodeId dec = g.affine(pooled, param_node("fusion/dec/w"), param_node("fusion/dec/b"));

  FusionOut out;
  out.traj = g.scale(g.slice_cols(dec, 0, tsteps), cfg.traj_scale);
  out.conf = g.softmax_rows(g.transpose(g.slice_cols(dec, tsteps, tsteps + 1)));
  return out;
}

ModelGraph::Forward ModelGraph::forward(
  const std::vector<Tensor> & layer_rgbs, const std::array<double, 3> & kinematics)
{
  const ArchConfig & cfg = model_->cfg;
  Graph & g = *graph_;
  if (static_cast<int>(layer_rgbs.size()) != cfg.backbones) {
    throw ConfigError("layer count does not match the configured backbone count");
  }
  NodeId kin = g.input(Tensor::row({kinematics[0], kinematics[1], kinematics[2]}));

  Forward fwd;
  std::vector<std::pair<NodeId, int>> tokens;
  for (int n = 0; n < cfg.backbones; ++n) {
    NodeId grid = g.input(layer_rgbs[static_cast<std::size_t>(n)]);
    NodeId feature = backbone_node(n, grid);
    HeadOut head = head_node(n, feature, kin);
    fwd.head_traj.push_back(g.stack_rows(head.traj_rows));
    fwd.head_logits.push_back(head.logits);
    fwd.head_conf.push_back(head.conf);
    for (int k = 0; k < cfg.hypotheses_per_head; ++k) {
      NodeId token = g.concat_cols({head.traj_rows[static_cast<std::size_t>(k)],
                                    g.pick(head.conf, 0, k)});
      tokens.emplace_back(token, n);
    }
  }
  FusionOut fused = fuse_token_rows(tokens);
  fwd.fused_traj = fused.traj;
  fwd.fused_conf = fused.conf;
  return fwd;
}

Tensor grid_to_tensor(const Grid & grid)
{
  const int s = grid.size;
  Tensor t = Tensor::zeros(3, s * s);
  for (int row = 0; row < s; ++row) {
    for (int col = 0; col < s; ++col) {
      for (int ch = 0; ch < 3; ++ch) {
        t.at(ch, row * s + col) = grid.at(col, row, ch);
      }
    }
  }
  return t;
}

namespace
{

std::vector<std::vector<Vec2>> traj_matrix_to_paths(const Tensor & t)
{
  std::vector<std::vector<Vec2>> out(static_cast<std::size_t>(t.rows));
  for (int r = 0; r < t.rows; ++r) {
    out[static_cast<std::size_t>(r)].reserve(static_cast<std::size_t>(t.cols) / 2);
    for (int c = 0; c + 1 < t.cols; c += 2) {
      out[static_cast<std::size_t>(r)].push_back({t.at(r, c), t.at(r, c + 1)});
    }
  }
  return out;
}

}  // namespace

std::vector<double> backbone_forward(const Model & model, int backbone, const Grid & grid)
{
  Graph g;
  ModelGraph mg(g, model);
  NodeId feature = mg.backbone_node(backbone, g.input(grid_to_tensor(grid)));
  return g.value(feature).v;
}

HypothesisSet head_forward(
  const Model & model, int backbone, const std::vector<double> & feature,
  const std::array<double, 3> & kinematics)
{
  if (static_cast<int>(feature.size()) != model.cfg.feature_dim()) {
    throw ConfigError("feature vector length does not match the backbone feature width");
  }
  Graph g;
  ModelGraph mg(g, model);
  NodeId feat = g.input(Tensor::row(feature));
  NodeId kin = g.input(Tensor::row({kinematics[0], kinematics[1], kinematics[2]}));
  ModelGraph::HeadOut head = mg.head_node(backbone, feat, kin);

  HypothesisSet set;
  const Tensor & logits = g.value(head.logits);
  const Tensor & conf = g.value(head.conf);
  for (int k = 0; k < model.cfg.hypotheses_per_head; ++k) {
    Hypothesis h;
    const Tensor & row = g.value(head.traj_rows[static_cast<std::size_t>(k)]);
    for (int c = 0; c + 1 < row.cols; c += 2) {
      h.trajectory.push_back({row.at(0, c), row.at(0, c + 1)});
    }
    h.confidence_logit = logits.at(0, k);
    set.hypotheses.push_back(std::move(h));
    set.confidences.push_back(conf.at(0, k));
  }
  return set;
}

Prediction fuse_token_values(
  const Model & model, const std::vector<std::pair<std::vector<double>, int>> & tokens)
{
  Graph g;
  ModelGraph mg(g, model);
  std::vector<std::pair<NodeId, int>> rows;
  rows.reserve(tokens.size());
  for (const auto & [values, backbone] : tokens) {
    rows.emplace_back(g.input(Tensor::row(values)), backbone);
  }
  ModelGraph::FusionOut fused = mg.fuse_token_rows(rows);

  Prediction pred;
  pred.trajectories = traj_matrix_to_paths(g.value(fused.traj));
  pred.confidences = g.value(fused.conf).v;
  return pred;
}

Prediction fuse_hypotheses(const Model & model, const std::vector<HypothesisSet> & sets)
{
  if (sets.empty()) {
    throw ConfigError("fusion requires at least one hypothesis set");
  }
  const int tsteps = model.cfg.horizon_steps;
  std::vector<std::pair<std::vector<double>, int>> tokens;
  for (std::size_t n = 0; n < sets.size(); ++n) {
    const HypothesisSet & set = sets[n];
    if (set.hypotheses.size() != set.confidences.size()) {
      throw ConfigError("hypothesis set has mismatched confidence count");
    }
    for (std::size_t k = 0; k < set.hypotheses.size(); ++k) {
      const Hypothesis & h = set.hypotheses[k];
      if (static_cast<int>(h.trajectory.size()) != tsteps) {
        throw ConfigError("hypothesis trajectory length does not match the horizon");
      }
      std::vector<double> row;
      row.reserve(2 * static_cast<std::size_t>(tsteps) + 1);
      for (const Vec2 & p : h.trajectory) {
        row.push_back(p.x);
        row.push_back(p.y);
      }
      row.push_back(set.confidences[k]);
      tokens.emplace_back(std::move(row), static_cast<int>(n));
    }
  }
  return fuse_token_values(model, tokens);
}

ModelOutput model_forward(
  const Model & model, const RasterStack & stack, const std::array<double, 3> & kinematics)
{
  const ArchConfig & cfg = model.cfg;
  if (static_cast<int>(stack.layers.size()) != cfg.backbones) {
    throw ConfigError("raster stack layer count does not match the backbone count");
  }
  std::vector<Tensor> inputs;
  inputs.reserve(stack.layers.size());
  for (const Grid & layer : stack.layers) {
    if (layer.size != cfg.raster_size) {
      throw ConfigError("raster layer size does not match the configured input size");
    }
    inputs.push_back(grid_to_tensor(layer));
  }

  Graph g;
  ModelGraph mg(g, model);
  ModelGraph::Forward fwd = mg.forward(inputs, kinematics);

  ModelOutput out;
  out.prediction.trajectories = traj_matrix_to_paths(g.value(fwd.fused_traj));
  out.prediction.confidences = g.value(fwd.fused_conf).v;
  for (int n = 0; n < cfg.backbones; ++n) {
    HypothesisSet set;
    const Tensor & traj = g.value(fwd.head_traj[static_cast<std::size_t>(n)]);
    const Tensor & logits = g.value(fwd.head_logits[static_cast<std::size_t>(n)]);
    const Tensor & conf = g.value(fwd.head_conf[static_cast<std::size_t>(n)]);
    auto paths = traj_matrix_to_paths(traj);
    for (int k = 0; k < cfg.hypotheses_per_head; ++k) {
      Hypothesis h;
      h.trajectory = std::move(paths[static_cast<std::size_t>(k)]);
      h.confidence_logit = logits.at(0, k);
      set.hypotheses.push_back(std::move(h));
      set.confidences.push_back(conf.at(0, k));
    }
    out.per_backbone.push_back(std::move(set));
  }
  return out;
}

}  // namespace trajlab
