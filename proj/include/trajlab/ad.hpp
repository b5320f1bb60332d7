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

#ifndef TRAJLAB__AD_HPP_
#define TRAJLAB__AD_HPP_

/// \file
/// Reverse-mode automatic differentiation on a flat tape.
///
/// A Graph records every operation as a node holding its value, its
/// gradient buffer, and a backward closure.  Calling backward() on a
/// scalar node runs the closures in reverse creation order, which makes
/// gradient accumulation order deterministic by construction.

#include <functional>
#include <string>
#include <vector>

namespace trajlab
{

/// Dense row-major matrix of doubles.  Vectors are 1xN or Nx1 tensors.
struct Tensor
{
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  static Tensor zeros(int rows, int cols);
  static Tensor full(int rows, int cols, double value);
  static Tensor row(const std::vector<double> & values);

  double & at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return v.size(); }
};

enum class Activation { kIdentity, kRelu, kTanh };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string & name);  // throws ArgumentError

/// Shape bookkeeping for conv2d over a CxHxW tensor stored as rows=C,
/// cols=H*W.  Weights are rows=out_c, cols=in_c*k*k; bias is out_c x 1.
struct Conv2dShape
{
  int in_c = 0;
  int h = 0;
  int w = 0;
  int out_c = 0;
  int k = 3;
  int stride = 2;
  int pad = 1;

  int out_h() const { return (h + 2 * pad - k) / stride + 1; }
  int out_w() const { return (w + 2 * pad - k) / stride + 1; }
};

using NodeId = int;

class Graph
{
public:
  NodeId input(Tensor value);

  const Tensor & value(NodeId id) const;
  const Tensor & grad(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId scale(NodeId a, double s);
  NodeId matmul(NodeId a, NodeId b);
  /// a (m x k) times b (n x k) transposed, giving m x n.
  NodeId matmul_nt(NodeId a, NodeId b);
  /// x (m x k) times w (k x n) plus bias b (1 x n) broadcast over rows.
  NodeId affine(NodeId x, NodeId w, NodeId b);
  NodeId activation(NodeId x, Activation kind);
  NodeId conv2d(NodeId x, NodeId w, NodeId b, const Conv2dShape & shape);
  /// Mean over columns: rows x cols -> rows x 1.
  NodeId global_avg_pool(NodeId x);
  NodeId softmax_rows(NodeId x);
  NodeId stack_rows(const std::vector<NodeId> & rows);
  NodeId concat_cols(const std::vector<NodeId> & parts);
  NodeId slice_rows(NodeId x, int r0, int r1);
  NodeId slice_cols(NodeId x, int c0, int c1);
  NodeId transpose(NodeId x);
  NodeId reshape(NodeId x, int rows, int cols);
  NodeId pick(NodeId x, int r, int c);
  NodeId mean_of(const std::vector<NodeId> & scalars);

  /// Mean over timesteps of the pointwise Euclidean distance between a
  /// 1 x 2T row [x1,y1,...,xT,yT] and a target of the same layout.
  NodeId mean_pointwise_l2(NodeId pred, const std::vector<double> & target);
  /// Smooth variant: mean of squared pointwise distances.
  NodeId mean_pointwise_l2_squared(NodeId pred, const std::vector<double> & target);
  /// -ln(max(x, floor_value)) for a 1 x 1 node.
  NodeId neg_log_floor(NodeId x, double floor_value);

  /// Zeroes all gradients, seeds d(output)/d(output) = 1, then runs the
  /// backward closures in reverse creation order.
  void backward(NodeId output);

private:
  struct Node
  {
    Tensor value;
    Tensor grad;
    std::function<void()> back;
  };

  NodeId emplace(Tensor value, std::function<void()> back);
  Tensor & grad_ref(NodeId id) { return nodes_[static_cast<std::size_t>(id)].grad; }

  std::vector<Node> nodes_;
};

struct GradCheckReport
{
  bool ok = false;
  double max_error = 0.0;  ///< max |analytic - numeric| / max(1, |analytic|)
  int worst_index = -1;
  int checked = 0;
};

/// Central-difference check of an analytic gradient.  `f` evaluates the
/// scalar objective at a parameter vector; `analytic` is d f / d point.
/// When max_checks is smaller than the dimension, coordinates are probed
/// at a deterministic stride so the check stays cheap on larger models.
GradCheckReport gradient_check(
  const std::function<double(const std::vector<double> &)> & f,
  const std::vector<double> & point, const std::vector<double> & analytic, double eps,
  double tol, int max_checks = 0);

}  // namespace trajlab

#endif  // TRAJLAB__AD_HPP_
