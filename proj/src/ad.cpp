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

#include "trajlab/ad.hpp"

#include <algorithm>
#include <cmath>

#include "trajlab/error.hpp"

namespace trajlab
{
namespace
{

void require(bool cond, const char * what)
{
  if (!cond) {
    throw ArgumentError(std::string("graph op: ") + what);
  }
}

}  // namespace

Tensor Tensor::zeros(int rows, int cols)
{
  Tensor t;
  t.rows = rows;
  t.cols = cols;
  t.v.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  return t;
}

Tensor Tensor::full(int rows, int cols, double value)
{
  Tensor t = zeros(rows, cols);
  std::fill(t.v.begin(), t.v.end(), value);
  return t;
}

Tensor Tensor::row(const std::vector<double> & values)
{
  Tensor t;
  t.rows = 1;
  t.cols = static_cast<int>(values.size());
  t.v = values;
  return t;
}

std::string activation_name(Activation a)
{
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
  }
  return "unknown";
}

Activation activation_from_name(const std::string & name)
{
  if (name == "identity") {
    return Activation::kIdentity;
  }
  if (name == "relu") {
    return Activation::kRelu;
  }
  if (name == "tanh") {
    return Activation::kTanh;
  }
  throw ArgumentError("unknown activation: " + name);
}

NodeId Graph::emplace(Tensor value, std::function<void()> back)
{
  Node node;
  node.grad = Tensor::zeros(value.rows, value.cols);
  node.value = std::move(value);
  node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::input(Tensor value)
{
  return emplace(std::move(value), nullptr);
}

const Tensor & Graph::value(NodeId id) const
{
  return nodes_[static_cast<std::size_t>(id)].value;
}

const Tensor & Graph::grad(NodeId id) const
{
  return nodes_[static_cast<std::size_t>(id)].grad;
}

NodeId Graph::add(NodeId a, NodeId b)
{
  const Tensor & ta = value(a);
  const Tensor & tb = value(b);
  require(ta.rows == tb.rows && ta.cols == tb.cols, "add shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    out.v[i] += tb.v[i];
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, a, b, id]() {
    const Tensor & g = grad(id);
    Tensor & ga = grad_ref(a);
    Tensor & gb = grad_ref(b);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
      ga.v[i] += g.v[i];
      gb.v[i] += g.v[i];
    }
  };
  return id;
}

NodeId Graph::sub(NodeId a, NodeId b)
{
  const Tensor & ta = value(a);
  const Tensor & tb = value(b);
  require(ta.rows == tb.rows && ta.cols == tb.cols, "sub shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    out.v[i] -= tb.v[i];
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, a, b, id]() {
    const Tensor & g = grad(id);
    Tensor & ga = grad_ref(a);
    Tensor & gb = grad_ref(b);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
      ga.v[i] += g.v[i];
      gb.v[i] -= g.v[i];
    }
  };
  return id;
}

NodeId Graph::scale(NodeId a, double s)
{
  Tensor out = value(a);
  for (double & x : out.v) {
    x *= s;
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, a, s, id]() {
    const Tensor & g = grad(id);
    Tensor & ga = grad_ref(a);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
      ga.v[i] += s * g.v[i];
    }
  };
  return id;
}

NodeId Graph::matmul(NodeId a, NodeId b)
{
  const Tensor & ta = value(a);
  const Tensor & tb = value(b);
  require(ta.cols == tb.rows, "matmul inner dimension mismatch");
  Tensor out = Tensor::zeros(ta.rows, tb.cols);
  for (int i = 0; i < ta.rows; ++i) {
    for (int k = 0; k < ta.cols; ++k) {
      const double aik = ta.at(i, k);
      for (int j = 0; j < tb.cols; ++j) {
        out.at(i, j) += aik * tb.at(k, j);
      }
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, a, b, id]() {
    const Tensor & g = grad(id);
    const Tensor & ta2 = value(a);
    const Tensor & tb2 = value(b);
    Tensor & ga = grad_ref(a);
    Tensor & gb = grad_ref(b);
    for (int i = 0; i < ta2.rows; ++i) {
      for (int j = 0; j < tb2.cols; ++j) {
        const double gij = g.at(i, j);
        if (gij == 0.0) {
          continue;
        }
        for (int k = 0; k < ta2.cols; ++k) {
          ga.at(i, k) += gij * tb2.at(k, j);
          gb.at(k, j) += gij * ta2.at(i, k);
        }
      }
    }
  };
  return id;
}

NodeId Graph::matmul_nt(NodeId a, NodeId b)
{
  const Tensor & ta = value(a);
  const Tensor & tb = value(b);
  require(ta.cols == tb.cols, "matmul_nt inner dimension mismatch");
  Tensor out = Tensor::zeros(ta.rows, tb.rows);
  for (int i = 0; i < ta.rows; ++i) {
    for (int j = 0; j < tb.rows; ++j) {
      double acc = 0.0;
      for (int k = 0; k < ta.cols; ++k) {
        acc += ta.at(i, k) * tb.at(j, k);
      }
      out.at(i, j) = acc;
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, a, b, id]() {
    const Tensor & g = grad(id);
    const Tensor & ta2 = value(a);
    const Tensor & tb2 = value(b);
    Tensor & ga = grad_ref(a);
    Tensor & gb = grad_ref(b);
    for (int i = 0; i < ta2.rows; ++i) {
      for (int j = 0; j < tb2.rows; ++j) {
        const double gij = g.at(i, j);
        if (gij == 0.0) {
          continue;
        }
        for (int k = 0; k < ta2.cols; ++k) {
          ga.at(i, k) += gij * tb2.at(j, k);
          gb.at(j, k) += gij * ta2.at(i, k);
        }
      }
    }
  };
  return id;
}

NodeId Graph::affine(NodeId x, NodeId w, NodeId b)
{
  const Tensor & tx = value(x);
  const Tensor & tw = value(w);
  const Tensor & tb = value(b);
  require(tx.cols == tw.rows, "affine inner dimension mismatch");
  require(tb.rows == 1 && tb.cols == tw.cols, "affine bias must be 1 x out");
  Tensor out = Tensor::zeros(tx.rows, tw.cols);
  for (int i = 0; i < tx.rows; ++i) {
    for (int j = 0; j < tw.cols; ++j) {
      out.at(i, j) = tb.at(0, j);
    }
    for (int k = 0; k < tx.cols; ++k) {
      const double xik = tx.at(i, k);
      for (int j = 0; j < tw.cols; ++j) {
        out.at(i, j) += xik * tw.at(k, j);
      }
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, w, b, id]() {
    const Tensor & g = grad(id);
    const Tensor & tx2 = value(x);
    const Tensor & tw2 = value(w);
    Tensor & gx = grad_ref(x);
    Tensor & gw = grad_ref(w);
    Tensor & gb = grad_ref(b);
    for (int i = 0; i < tx2.rows; ++i) {
      for (int j = 0; j < tw2.cols; ++j) {
        const double gij = g.at(i, j);
        if (gij == 0.0) {
          continue;
        }
        gb.at(0, j) += gij;
        for (int k = 0; k < tx2.cols; ++k) {
          gx.at(i, k) += gij * tw2.at(k, j);
          gw.at(k, j) += gij * tx2.at(i, k);
        }
      }
    }
  };
  return id;
}

NodeId Graph::activation(NodeId x, Activation kind)
{
  Tensor out = value(x);
  switch (kind) {
    case Activation::kIdentity:
      break;
    case Activation::kRelu:
      for (double & v : out.v) {
        v = v > 0.0 ? v : 0.0;
      }
      break;
    case Activation::kTanh:
      for (double & v : out.v) {
        v = std::tanh(v);
      }
      break;
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, kind, id]() {
    const Tensor & g = grad(id);
    const Tensor & y = value(id);
    const Tensor & tx = value(x);
    Tensor & gx = grad_ref(x);
    switch (kind) {
      case Activation::kIdentity:
        for (std::size_t i = 0; i < g.v.size(); ++i) {
          gx.v[i] += g.v[i];
        }
        break;
      case Activation::kRelu:
        for (std::size_t i = 0; i < g.v.size(); ++i) {
          if (tx.v[i] > 0.0) {
            gx.v[i] += g.v[i];
          }
        }
        break;
      case Activation::kTanh:
        for (std::size_t i = 0; i < g.v.size(); ++i) {
          gx.v[i] += g.v[i] * (1.0 - y.v[i] * y.v[i]);
        }
        break;
    }
  };
  return id;
}

NodeId Graph::conv2d(NodeId x, NodeId w, NodeId b, const Conv2dShape & shape)
{
  const Tensor & tx = value(x);
  const Tensor & tw = value(w);
  const Tensor & tb = value(b);
  require(tx.rows == shape.in_c && tx.cols == shape.h * shape.w, "conv2d input shape");
  require(
    tw.rows == shape.out_c && tw.cols == shape.in_c * shape.k * shape.k, "conv2d weight shape");
  require(tb.rows == shape.out_c && tb.cols == 1, "conv2d bias shape");
  const int oh = shape.out_h();
  const int ow = shape.out_w();
  require(oh > 0 && ow > 0, "conv2d output is empty");
  Tensor out = Tensor::zeros(shape.out_c, oh * ow);
  for (int oc = 0; oc < shape.out_c; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = tb.at(oc, 0);
        for (int ic = 0; ic < shape.in_c; ++ic) {
          for (int ky = 0; ky < shape.k; ++ky) {
            const int iy = oy * shape.stride + ky - shape.pad;
            if (iy < 0 || iy >= shape.h) {
              continue;
            }
            for (int kx = 0; kx < shape.k; ++kx) {
              const int ix = ox * shape.stride + kx - shape.pad;
              if (ix < 0 || ix >= shape.w) {
                continue;
              }
              acc += tw.at(oc, (ic * shape.k + ky) * shape.k + kx) * tx.at(ic, iy * shape.w + ix);
            }
          }
        }
        out.at(oc, oy * ow + ox) = acc;
      }
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, w, b, shape, id]() {
    const Tensor & g = grad(id);
    const Tensor & tx2 = value(x);
    const Tensor & tw2 = value(w);
    Tensor & gx = grad_ref(x);
    Tensor & gw = grad_ref(w);
    Tensor & gb = grad_ref(b);
    const int oh = shape.out_h();
    const int ow = shape.out_w();
    for (int oc = 0; oc < shape.out_c; ++oc) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          const double go = g.at(oc, oy * ow + ox);
          if (go == 0.0) {
            continue;
          }
          gb.at(oc, 0) += go;
          for (int ic = 0; ic < shape.in_c; ++ic) {
            for (int ky = 0; ky < shape.k; ++ky) {
              const int iy = oy * shape.stride + ky - shape.pad;
              if (iy < 0 || iy >= shape.h) {
                continue;
              }
              for (int kx = 0; kx < shape.k; ++kx) {
                const int ix = ox * shape.stride + kx - shape.pad;
                if (ix < 0 || ix >= shape.w) {
                  continue;
                }
                const int widx = (ic * shape.k + ky) * shape.k + kx;
                gw.at(oc, widx) += go * tx2.at(ic, iy * shape.w + ix);
                gx.at(ic, iy * shape.w + ix) += go * tw2.at(oc, widx);
              }
            }
          }
        }
      }
    }
  };
  return id;
}

NodeId Graph::global_avg_pool(NodeId x)
{
  const Tensor & tx = value(x);
  require(tx.cols > 0, "global_avg_pool over empty tensor");
  Tensor out = Tensor::zeros(tx.rows, 1);
  for (int r = 0; r < tx.rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < tx.cols; ++c) {
      acc += tx.at(r, c);
    }
    out.at(r, 0) = acc / tx.cols;
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, id]() {
    const Tensor & g = grad(id);
    Tensor & gx = grad_ref(x);
    const double inv = 1.0 / gx.cols;
    for (int r = 0; r < gx.rows; ++r) {
      const double gr = g.at(r, 0) * inv;
      for (int c = 0; c < gx.cols; ++c) {
        gx.at(r, c) += gr;
      }
    }
  };
  return id;
}

NodeId Graph::softmax_rows(NodeId x)
{
  const Tensor & tx = value(x);
  Tensor out = Tensor::zeros(tx.rows, tx.cols);
  for (int r = 0; r < tx.rows; ++r) {
    double mx = tx.at(r, 0);
    for (int c = 1; c < tx.cols; ++c) {
      mx = std::max(mx, tx.at(r, c));
    }
    double denom = 0.0;
    for (int c = 0; c < tx.cols; ++c) {
      const double e = std::exp(tx.at(r, c) - mx);
      out.at(r, c) = e;
      denom += e;
    }
    for (int c = 0; c < tx.cols; ++c) {
      out.at(r, c) /= denom;
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, id]() {
    const Tensor & g = grad(id);
    const Tensor & y = value(id);
    Tensor & gx = grad_ref(x);
    for (int r = 0; r < y.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < y.cols; ++c) {
        dot += g.at(r, c) * y.at(r, c);
      }
      for (int c = 0; c < y.cols; ++c) {
        gx.at(r, c) += y.at(r, c) * (g.at(r, c) - dot);
      }
    }
  };
  return id;
}

NodeId Graph::stack_rows(const std::vector<NodeId> & rows)
{
  require(!rows.empty(), "stack_rows of nothing");
  const int cols = value(rows[0]).cols;
  for (NodeId r : rows) {
    require(value(r).rows == 1 && value(r).cols == cols, "stack_rows expects matching 1 x n rows");
  }
  Tensor out = Tensor::zeros(static_cast<int>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Tensor & t = value(rows[i]);
    std::copy(t.v.begin(), t.v.end(), out.v.begin() + static_cast<std::ptrdiff_t>(i) * cols);
  }
  NodeId id = emplace(std::move(out), nullptr);
  std::vector<NodeId> parents = rows;
  nodes_[static_cast<std::size_t>(id)].back = [this, parents, cols, id]() {
    const Tensor & g = grad(id);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      Tensor & gp = grad_ref(parents[i]);
      for (int c = 0; c < cols; ++c) {
        gp.at(0, c) += g.at(static_cast<int>(i), c);
      }
    }
  };
  return id;
}

NodeId Graph::concat_cols(const std::vector<NodeId> & parts)
{
  require(!parts.empty(), "concat_cols of nothing");
  const int rows = value(parts[0]).rows;
  int total = 0;
  for (NodeId p : parts) {
    require(value(p).rows == rows, "concat_cols row mismatch");
    total += value(p).cols;
  }
  Tensor out = Tensor::zeros(rows, total);
  int base = 0;
  for (NodeId p : parts) {
    const Tensor & t = value(p);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < t.cols; ++c) {
        out.at(r, base + c) = t.at(r, c);
      }
    }
    base += t.cols;
  }
  NodeId id = emplace(std::move(out), nullptr);
  std::vector<NodeId> parents = parts;
  nodes_[static_cast<std::size_t>(id)].back = [this, parents, id]() {
    const Tensor & g = grad(id);
    int base2 = 0;
    for (NodeId p : parents) {
      Tensor & gp = grad_ref(p);
      for (int r = 0; r < gp.rows; ++r) {
        for (int c = 0; c < gp.cols; ++c) {
          gp.at(r, c) += g.at(r, base2 + c);
        }
      }
      base2 += gp.cols;
    }
  };
  return id;
}

NodeId Graph::slice_rows(NodeId x, int r0, int r1)
{
  const Tensor & tx = value(x);
  require(0 <= r0 && r0 < r1 && r1 <= tx.rows, "slice_rows out of range");
  Tensor out = Tensor::zeros(r1 - r0, tx.cols);
  for (int r = r0; r < r1; ++r) {
    for (int c = 0; c < tx.cols; ++c) {
      out.at(r - r0, c) = tx.at(r, c);
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, r0, id]() {
    const Tensor & g = grad(id);
    Tensor & gx = grad_ref(x);
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) {
        gx.at(r0 + r, c) += g.at(r, c);
      }
    }
  };
  return id;
}

NodeId Graph::slice_cols(NodeId x, int c0, int c1)
{
  const Tensor & tx = value(x);
  require(0 <= c0 && c0 < c1 && c1 <= tx.cols, "slice_cols out of range");
  Tensor out = Tensor::zeros(tx.rows, c1 - c0);
  for (int r = 0; r < tx.rows; ++r) {
    for (int c = c0; c < c1; ++c) {
      out.at(r, c - c0) = tx.at(r, c);
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, c0, id]() {
    const Tensor & g = grad(id);
    Tensor & gx = grad_ref(x);
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) {
        gx.at(r, c0 + c) += g.at(r, c);
      }
    }
  };
  return id;
}

NodeId Graph::transpose(NodeId x)
{
  const Tensor & tx = value(x);
  Tensor out = Tensor::zeros(tx.cols, tx.rows);
  for (int r = 0; r < tx.rows; ++r) {
    for (int c = 0; c < tx.cols; ++c) {
      out.at(c, r) = tx.at(r, c);
    }
  }
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, id]() {
    const Tensor & g = grad(id);
    Tensor & gx = grad_ref(x);
    for (int r = 0; r < gx.rows; ++r) {
      for (int c = 0; c < gx.cols; ++c) {
        gx.at(r, c) += g.at(c, r);
      }
    }
  };
  return id;
}

NodeId Graph::reshape(NodeId x, int rows, int cols)
{
  const Tensor & tx = value(x);
  require(
    static_cast<std::size_t>(rows) * cols == tx.v.size(), "reshape size mismatch");
  Tensor out;
  out.rows = rows;
  out.cols = cols;
  out.v = tx.v;
  NodeId id = emplace(std::move(out), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, id]() {
    const Tensor & g = grad(id);
    Tensor & gx = grad_ref(x);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
      gx.v[i] += g.v[i];
    }
  };
  return id;
}

NodeId Graph::pick(NodeId x, int r, int c)
{
  const Tensor & tx = value(x);
  require(0 <= r && r < tx.rows && 0 <= c && c < tx.cols, "pick out of range");
  NodeId id = emplace(Tensor::full(1, 1, tx.at(r, c)), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, r, c, id]() {
    grad_ref(x).at(r, c) += grad(id).at(0, 0);
  };
  return id;
}

NodeId Graph::mean_of(const std::vector<NodeId> & scalars)
{
  require(!scalars.empty(), "mean_of nothing");
  double acc = 0.0;
  for (NodeId s : scalars) {
    require(value(s).rows == 1 && value(s).cols == 1, "mean_of expects 1 x 1 nodes");
    acc += value(s).at(0, 0);
  }
  NodeId id = emplace(Tensor::full(1, 1, acc / static_cast<double>(scalars.size())), nullptr);
  std::vector<NodeId> parents = scalars;
  nodes_[static_cast<std::size_t>(id)].back = [this, parents, id]() {
    const double g = grad(id).at(0, 0) / static_cast<double>(parents.size());
    for (NodeId p : parents) {
      grad_ref(p).at(0, 0) += g;
    }
  };
  return id;
}

NodeId Graph::mean_pointwise_l2(NodeId pred, const std::vector<double> & target)
{
  const Tensor & tp = value(pred);
  require(tp.rows == 1 && tp.cols == static_cast<int>(target.size()), "l2 target shape");
  require(tp.cols % 2 == 0 && tp.cols > 0, "l2 layout must be x,y pairs");
  const int steps = tp.cols / 2;
  double acc = 0.0;
  for (int t = 0; t < steps; ++t) {
    const double dx = tp.at(0, 2 * t) - target[2 * t];
    const double dy = tp.at(0, 2 * t + 1) - target[2 * t + 1];
    acc += std::hypot(dx, dy);
  }
  NodeId id = emplace(Tensor::full(1, 1, acc / steps), nullptr);
  std::vector<double> tgt = target;
  nodes_[static_cast<std::size_t>(id)].back = [this, pred, tgt, steps, id]() {
    const double g = grad(id).at(0, 0) / steps;
    const Tensor & tp2 = value(pred);
    Tensor & gp = grad_ref(pred);
    for (int t = 0; t < steps; ++t) {
      const double dx = tp2.at(0, 2 * t) - tgt[2 * t];
      const double dy = tp2.at(0, 2 * t + 1) - tgt[2 * t + 1];
      const double d = std::hypot(dx, dy);
      if (d > 1e-12) {
        gp.at(0, 2 * t) += g * dx / d;
        gp.at(0, 2 * t + 1) += g * dy / d;
      }
    }
  };
  return id;
}

NodeId Graph::mean_pointwise_l2_squared(NodeId pred, const std::vector<double> & target)
{
  const Tensor & tp = value(pred);
  require(tp.rows == 1 && tp.cols == static_cast<int>(target.size()), "l2 target shape");
  require(tp.cols % 2 == 0 && tp.cols > 0, "l2 layout must be x,y pairs");
  const int steps = tp.cols / 2;
  double acc = 0.0;
  for (int t = 0; t < steps; ++t) {
    const double dx = tp.at(0, 2 * t) - target[2 * t];
    const double dy = tp.at(0, 2 * t + 1) - target[2 * t + 1];
    acc += dx * dx + dy * dy;
  }
  NodeId id = emplace(Tensor::full(1, 1, acc / steps), nullptr);
  std::vector<double> tgt = target;
  nodes_[static_cast<std::size_t>(id)].back = [this, pred, tgt, steps, id]() {
    const double g = 2.0 * grad(id).at(0, 0) / steps;
    const Tensor & tp2 = value(pred);
    Tensor & gp = grad_ref(pred);
    for (int t = 0; t < steps; ++t) {
      gp.at(0, 2 * t) += g * (tp2.at(0, 2 * t) - tgt[2 * t]);
      gp.at(0, 2 * t + 1) += g * (tp2.at(0, 2 * t + 1) - tgt[2 * t + 1]);
    }
  };
  return id;
}

NodeId Graph::neg_log_floor(NodeId x, double floor_value)
{
  const Tensor & tx = value(x);
  require(tx.rows == 1 && tx.cols == 1, "neg_log_floor expects a scalar");
  const double p = tx.at(0, 0);
  NodeId id = emplace(Tensor::full(1, 1, -std::log(std::max(p, floor_value))), nullptr);
  nodes_[static_cast<std::size_t>(id)].back = [this, x, floor_value, id]() {
    const double p2 = value(x).at(0, 0);
    if (p2 > floor_value) {
      grad_ref(x).at(0, 0) += -grad(id).at(0, 0) / p2;
    }
  };
  return id;
}

void Graph::backward(NodeId output)
{
  require(output >= 0 && output < static_cast<NodeId>(nodes_.size()), "backward on bad node");
  const Tensor & out = value(output);
  require(out.rows == 1 && out.cols == 1, "backward needs a scalar output");
  for (Node & n : nodes_) {
    std::fill(n.grad.v.begin(), n.grad.v.end(), 0.0);
  }
  grad_ref(output).at(0, 0) = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) {
      nodes_[i].back();
    }
  }
}

GradCheckReport gradient_check(
  const std::function<double(const std::vector<double> &)> & f,
  const std::vector<double> & point, const std::vector<double> & analytic, double eps,
  double tol, int max_checks)
{
  if (point.size() != analytic.size()) {
    throw ArgumentError("gradient_check: point and gradient sizes differ");
  }
  if (!std::isfinite(f(point))) {
    throw NumericError("gradient_check: objective is not finite at the check point");
  }
  const int n = static_cast<int>(point.size());
  int stride = 1;
  if (max_checks > 0 && n > max_checks) {
    stride = (n + max_checks - 1) / max_checks;
  }
  GradCheckReport report;
  report.ok = true;
  std::vector<double> probe = point;
  for (int i = 0; i < n; i += stride) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double hi = f(probe);
    probe[i] = saved - eps;
    const double lo = f(probe);
    probe[i] = saved;
    const double numeric = (hi - lo) / (2.0 * eps);
    const double denom = std::max(1.0, std::fabs(analytic[i]));
    const double err = std::fabs(numeric - analytic[i]) / denom;
    ++report.checked;
    if (err > report.max_error) {
      report.max_error = err;
      report.worst_index = i;
    }
  }
  report.ok = report.max_error <= tol;
  return report;
}

}  // namespace trajlab
