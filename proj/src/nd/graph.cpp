// Copyright 2026 The eqforecast Authors
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

#include "eqf/nd/graph.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace eqf::nd
{

const char * op_name(Op op)
{
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kAffine: return "affine";
    case Op::kMatmul: return "matmul";
    case Op::kConcat: return "concat";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kRelu: return "relu";
    case Op::kSigmoid: return "sigmoid";
    case Op::kLog: return "log";
    case Op::kSoftmax: return "softmax";
    case Op::kL2Norm: return "l2_norm";
    case Op::kDetach: return "detach";
    case Op::kSlice: return "slice";
    case Op::kReshape: return "reshape";
    case Op::kTranspose: return "transpose";
    case Op::kGather: return "gather";
  }
  return "?";
}

Var Var::constant(Array value)
{
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var Var::parameter(Array value)
{
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

Array & Var::mutable_leaf_value()
{
  if (node_->op != Op::kLeaf) {
    throw std::logic_error(std::string("cannot mutate the value of a ") + op_name(node_->op) + " node");
  }
  return node_->value;
}

Array Gradients::at(const Var & param) const
{
  const auto it = grads_.find(param.node());
  if (it == grads_.end()) {
    return Array(param.shape(), 0.0);
  }
  return it->second;
}

namespace
{

Var make(Op op, std::vector<NodePtr> inputs, Array value, BackwardFn fn)
{
  auto node = std::make_shared<Node>();
  node->op = op;
  node->value = std::move(value);
  node->requires_grad =
    std::any_of(inputs.begin(), inputs.end(), [](const NodePtr & n) { return n->requires_grad; });
  if (node->requires_grad) {
    node->backward = std::move(fn);
  }
  node->inputs = std::move(inputs);
  return Var(std::move(node));
}

std::string op_error(const char * op, const Shape & a, const Shape & b)
{
  return std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b);
}

void check_axis(const char * op, const Shape & shape, std::size_t axis)
{
  if (axis >= shape.size()) {
    throw ShapeError(
      std::string(op) + ": axis " + std::to_string(axis) + " out of range for " + to_string(shape));
  }
}

/// outer = prod(shape[:axis]), inner = prod(shape[axis+1:])
std::pair<std::size_t, std::size_t> outer_inner(const Shape & shape, std::size_t axis)
{
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) {
    outer *= shape[i];
  }
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < shape.size(); ++i) {
    inner *= shape[i];
  }
  return {outer, inner};
}

struct Broadcast
{
  Shape out;
  std::vector<std::size_t> stride_a;
  std::vector<std::size_t> stride_b;
  bool same{false};
};

std::vector<std::size_t> aligned_strides(const Shape & shape, const Shape & out)
{
  const std::size_t pad = out.size() - shape.size();
  const auto own = strides_of(shape);
  std::vector<std::size_t> strides(out.size(), 0);
  for (std::size_t i = pad; i < out.size(); ++i) {
    strides[i] = shape[i - pad] == 1 ? 0 : own[i - pad];
  }
  return strides;
}

Broadcast plan(const char * op, const Shape & a, const Shape & b)
{
  Broadcast p;
  if (a == b) {
    p.out = a;
    p.same = true;
    return p;
  }
  try {
    p.out = broadcast_shapes(a, b);
  } catch (const ShapeError &) {
    throw ShapeError(op_error(op, a, b));
  }
  p.stride_a = aligned_strides(a, p.out);
  p.stride_b = aligned_strides(b, p.out);
  return p;
}

/// Calls f(out_index, a_index, b_index) over the broadcast output.
template <typename F>
void broadcast_loop(const Broadcast & p, F && f)
{
  const std::size_t total = numel(p.out);
  if (total == 0) {
    return;
  }
  if (p.same) {
    for (std::size_t i = 0; i < total; ++i) {
      f(i, i, i);
    }
    return;
  }
  const std::size_t rank = p.out.size();
  if (rank == 0) {
    f(0, 0, 0);
    return;
  }
  const std::size_t inner = p.out[rank - 1];
  const std::size_t step_a = p.stride_a[rank - 1];
  const std::size_t step_b = p.stride_b[rank - 1];
  std::vector<std::size_t> index(rank, 0);
  std::size_t ia = 0;
  std::size_t ib = 0;
  for (std::size_t o = 0; o < total; o += inner) {
    for (std::size_t k = 0; k < inner; ++k) {
      f(o + k, ia + k * step_a, ib + k * step_b);
    }
    for (std::size_t d = rank - 1; d-- > 0;) {
      ++index[d];
      ia += p.stride_a[d];
      ib += p.stride_b[d];
      if (index[d] < p.out[d]) {
        break;
      }
      ia -= p.stride_a[d] * p.out[d];
      ib -= p.stride_b[d] * p.out[d];
      index[d] = 0;
    }
  }
}

template <typename Forward, typename GradA, typename GradB>
Var binary(Op op, const Var & a, const Var & b, Forward fwd, GradA ga, GradB gb)
{
  auto p = plan(op_name(op), a.shape(), b.shape());
  Array out(p.out);
  const auto & va = a.value();
  const auto & vb = b.value();
  broadcast_loop(p, [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = fwd(va[i], vb[j]); });
  return make(
    op, {a.ptr(), b.ptr()}, std::move(out),
    [p = std::move(p), ga, gb](const Node & self, const Array & g, std::span<Array *> gin) {
      const auto & xa = self.inputs[0]->value;
      const auto & xb = self.inputs[1]->value;
      if (gin[0] != nullptr) {
        auto & da = *gin[0];
        broadcast_loop(p, [&](std::size_t o, std::size_t i, std::size_t j) {
          da[i] += ga(g[o], xa[i], xb[j]);
        });
      }
      if (gin[1] != nullptr) {
        auto & db = *gin[1];
        broadcast_loop(p, [&](std::size_t o, std::size_t i, std::size_t j) {
          db[j] += gb(g[o], xa[i], xb[j]);
        });
      }
    });
}

template <typename Forward, typename Derivative>
Var unary(Op op, const Var & a, Forward fwd, Derivative deriv)
{
  Array out(a.shape());
  const auto & va = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = fwd(va[i]);
  }
  return make(op, {a.ptr()}, std::move(out), [deriv](const Node & self, const Array & g, std::span<Array *> gin) {
    const auto & x = self.inputs[0]->value;
    const auto & y = self.value;
    auto & dx = *gin[0];
    for (std::size_t i = 0; i < dx.size(); ++i) {
      dx[i] += g[i] * deriv(x[i], y[i]);
    }
  });
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

}  // namespace

Var add(const Var & a, const Var & b)
{
  return binary(
    Op::kAdd, a, b, [](double x, double y) { return x + y; },
    [](double g, double, double) { return g; }, [](double g, double, double) { return g; });
}

Var sub(const Var & a, const Var & b)
{
  return binary(
    Op::kSub, a, b, [](double x, double y) { return x - y; },
    [](double g, double, double) { return g; }, [](double g, double, double) { return -g; });
}

Var mul(const Var & a, const Var & b)
{
  return binary(
    Op::kMul, a, b, [](double x, double y) { return x * y; },
    [](double g, double, double y) { return g * y; }, [](double g, double x, double) { return g * x; });
}

Var affine(const Var & a, double scale, double shift)
{
  return unary(
    Op::kAffine, a, [scale, shift](double x) { return scale * x + shift; },
    [scale](double, double) { return scale; });
}

Var matmul(const Var & a, const Var & b)
{
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError(op_error("matmul", a.shape(), b.shape()));
  }
  const auto m = static_cast<Eigen::Index>(a.dim(0));
  const auto k = static_cast<Eigen::Index>(a.dim(1));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  Array out(Shape{a.dim(0), b.dim(1)});
  MutMap(out.data().data(), m, n).noalias() =
    ConstMap(a.value().data().data(), m, k) * ConstMap(b.value().data().data(), k, n);
  return make(Op::kMatmul, {a.ptr(), b.ptr()}, std::move(out), [m, k, n](const Node & self, const Array & g, std::span<Array *> gin) {
    ConstMap gm(g.data().data(), m, n);
    if (gin[0] != nullptr) {
      ConstMap bm(self.inputs[1]->value.data().data(), k, n);
      MutMap(gin[0]->data().data(), m, k).noalias() += gm * bm.transpose();
    }
    if (gin[1] != nullptr) {
      ConstMap am(self.inputs[0]->value.data().data(), m, k);
      MutMap(gin[1]->data().data(), k, n).noalias() += am.transpose() * gm;
    }
  });
}

Var concat(std::span<const Var> parts, std::size_t axis)
{
  if (parts.empty()) {
    throw ShapeError("concat: no operands");
  }
  const Shape & first = parts[0].shape();
  check_axis("concat", first, axis);
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> widths;
  for (const auto & p : parts) {
    const Shape & s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) {
      ok = i == axis || s[i] == first[i];
    }
    if (!ok) {
      throw ShapeError(op_error("concat", first, s) + " on axis " + std::to_string(axis));
    }
    out_shape[axis] += s[axis];
  }
  const auto [outer, inner] = outer_inner(first, axis);
  const std::size_t out_row = out_shape[axis] * inner;
  Array out(out_shape);
  std::vector<NodePtr> inputs;
  std::size_t offset = 0;
  for (const auto & p : parts) {
    const std::size_t row = p.dim(axis) * inner;
    widths.push_back(row);
    const auto & v = p.value();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(v.data().begin() + o * row, row, out.data().begin() + o * out_row + offset);
    }
    offset += row;
    inputs.push_back(p.ptr());
  }
  return make(
    Op::kConcat, std::move(inputs), std::move(out),
    [widths = std::move(widths), outer = outer, out_row](const Node &, const Array & g, std::span<Array *> gin) {
      std::size_t off = 0;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        if (gin[i] != nullptr) {
          auto & d = *gin[i];
          for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t k = 0; k < widths[i]; ++k) {
              d[o * widths[i] + k] += g[o * out_row + off + k];
            }
          }
        }
        off += widths[i];
      }
    });
}

Var concat(std::initializer_list<Var> parts, std::size_t axis)
{
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

namespace
{

Var reduce(Op op, const Var & a, std::size_t axis, bool keep_dim, double scale)
{
  check_axis(op_name(op), a.shape(), axis);
  const auto [outer, inner] = outer_inner(a.shape(), axis);
  const std::size_t n = a.dim(axis);
  Shape out_shape = a.shape();
  if (keep_dim) {
    out_shape[axis] = 1;
  } else {
    out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  }
  Array out(out_shape);
  const auto & v = a.value();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t src = (o * n + k) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        out[o * inner + i] += v[src + i];
      }
    }
  }
  if (scale != 1.0) {
    for (auto & x : out.data()) {
      x *= scale;
    }
  }
  return make(op, {a.ptr()}, std::move(out), [outer = outer, inner = inner, n, scale](const Node &, const Array & g, std::span<Array *> gin) {
    auto & d = *gin[0];
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dst = (o * n + k) * inner;
        for (std::size_t i = 0; i < inner; ++i) {
          d[dst + i] += scale * g[o * inner + i];
        }
      }
    }
  });
}

}  // namespace

Var sum(const Var & a, std::size_t axis, bool keep_dim) { return reduce(Op::kSum, a, axis, keep_dim, 1.0); }

Var mean(const Var & a, std::size_t axis, bool keep_dim)
{
  check_axis("mean", a.shape(), axis);
  if (a.dim(axis) == 0) {
    throw ShapeError("mean: empty axis " + std::to_string(axis) + " of " + to_string(a.shape()));
  }
  return reduce(Op::kMean, a, axis, keep_dim, 1.0 / static_cast<double>(a.dim(axis)));
}

Var sum_all(const Var & a) { return sum(reshape(a, Shape{a.value().size()}), 0); }

Var relu(const Var & a)
{
  return unary(
    Op::kRelu, a, [](double x) { return x > 0.0 ? x : 0.0; },
    [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(const Var & a)
{
  return unary(
    Op::kSigmoid, a,
    [](double x) {
      if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
      }
      const double e = std::exp(x);
      return e / (1.0 + e);
    },
    [](double, double y) { return y * (1.0 - y); });
}

Var log(const Var & a, double floor)
{
  return unary(
    Op::kLog, a, [floor](double x) { return std::log(std::max(x, floor)); },
    [floor](double x, double) { return x > floor ? 1.0 / x : 0.0; });
}

Var softmax(const Var & a)
{
  if (a.shape().empty()) {
    throw ShapeError("softmax: scalar operand");
  }
  const std::size_t n = a.shape().back();
  const std::size_t rows = n == 0 ? 0 : a.value().size() / n;
  Array out(a.shape());
  const auto & v = a.value();
  for (std::size_t r = 0; r < rows; ++r) {
    const double * x = v.data().data() + r * n;
    double * y = out.data().data() + r * n;
    const double peak = *std::max_element(x, x + n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      y[k] = std::exp(x[k] - peak);
      total += y[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
      y[k] /= total;
    }
  }
  return make(Op::kSoftmax, {a.ptr()}, std::move(out), [rows, n](const Node & self, const Array & g, std::span<Array *> gin) {
    auto & d = *gin[0];
    const auto & y = self.value;
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        dot += g[r * n + k] * y[r * n + k];
      }
      for (std::size_t k = 0; k < n; ++k) {
        d[r * n + k] += y[r * n + k] * (g[r * n + k] - dot);
      }
    }
  });
}

Var l2_norm(const Var & a)
{
  if (a.shape().empty()) {
    throw ShapeError("l2_norm: scalar operand");
  }
  const std::size_t n = a.shape().back();
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  Array out(out_shape);
  const auto & v = a.value();
  for (std::size_t r = 0; r < out.size(); ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      s += v[r * n + k] * v[r * n + k];
    }
    out[r] = std::sqrt(s);
  }
  return make(Op::kL2Norm, {a.ptr()}, std::move(out), [n](const Node & self, const Array & g, std::span<Array *> gin) {
    auto & d = *gin[0];
    const auto & x = self.inputs[0]->value;
    const auto & y = self.value;
    for (std::size_t r = 0; r < y.size(); ++r) {
      if (y[r] == 0.0) {
        continue;
      }
      const double s = g[r] / y[r];
      for (std::size_t k = 0; k < n; ++k) {
        d[r * n + k] += s * x[r * n + k];
      }
    }
  });
}

Var detach(const Var & a)
{
  auto node = std::make_shared<Node>();
  node->op = Op::kDetach;
  node->value = a.value();
  node->inputs = {a.ptr()};
  node->detached = true;
  return Var(std::move(node));
}

Var slice(const Var & a, std::size_t axis, std::size_t start, std::size_t length)
{
  check_axis("slice", a.shape(), axis);
  if (start + length > a.dim(axis)) {
    throw ShapeError(
      "slice: range [" + std::to_string(start) + ", " + std::to_string(start + length) +
      ") exceeds axis " + std::to_string(axis) + " of " + to_string(a.shape()));
  }
  const auto [outer, inner] = outer_inner(a.shape(), axis);
  const std::size_t in_row = a.dim(axis) * inner;
  const std::size_t out_row = length * inner;
  const std::size_t off = start * inner;
  Shape out_shape = a.shape();
  out_shape[axis] = length;
  Array out(out_shape);
  const auto & v = a.value();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(v.data().begin() + o * in_row + off, out_row, out.data().begin() + o * out_row);
  }
  return make(Op::kSlice, {a.ptr()}, std::move(out), [outer = outer, in_row, out_row, off](const Node &, const Array & g, std::span<Array *> gin) {
    auto & d = *gin[0];
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t k = 0; k < out_row; ++k) {
        d[o * in_row + off + k] += g[o * out_row + k];
      }
    }
  });
}

Var reshape(const Var & a, Shape shape)
{
  if (numel(shape) != a.value().size()) {
    throw ShapeError("reshape: cannot view " + to_string(a.shape()) + " as " + to_string(shape));
  }
  return make(Op::kReshape, {a.ptr()}, a.value().reshaped(std::move(shape)), [](const Node &, const Array & g, std::span<Array *> gin) {
    auto & d = *gin[0];
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] += g[i];
    }
  });
}

namespace
{

/// Input offset for each output element of a permutation.
std::vector<std::size_t> permutation_offsets(const Shape & in, const std::vector<std::size_t> & perm)
{
  const auto in_strides = strides_of(in);
  Shape out(perm.size());
  std::vector<std::size_t> stride(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out[i] = in[perm[i]];
    stride[i] = in_strides[perm[i]];
  }
  std::vector<std::size_t> offsets(numel(in));
  std::vector<std::size_t> index(perm.size(), 0);
  std::size_t src = 0;
  for (std::size_t o = 0; o < offsets.size(); ++o) {
    offsets[o] = src;
    for (std::size_t d = perm.size(); d-- > 0;) {
      ++index[d];
      src += stride[d];
      if (index[d] < out[d]) {
        break;
      }
      src -= stride[d] * out[d];
      index[d] = 0;
    }
  }
  return offsets;
}

}  // namespace

Var transpose(const Var & a, std::vector<std::size_t> perm)
{
  const Shape & in = a.shape();
  std::vector<std::size_t> check = perm;
  std::sort(check.begin(), check.end());
  std::vector<std::size_t> iota(in.size());
  std::iota(iota.begin(), iota.end(), 0);
  if (check != iota) {
    throw ShapeError("transpose: invalid permutation for " + to_string(in));
  }
  Shape out_shape(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out_shape[i] = in[perm[i]];
  }
  auto offsets = permutation_offsets(in, perm);
  Array out(out_shape);
  const auto & v = a.value();
  for (std::size_t o = 0; o < offsets.size(); ++o) {
    out[o] = v[offsets[o]];
  }
  return make(Op::kTranspose, {a.ptr()}, std::move(out), [offsets = std::move(offsets)](const Node &, const Array & g, std::span<Array *> gin) {
    auto & d = *gin[0];
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      d[offsets[o]] += g[o];
    }
  });
}

Var gather_rows(const Var & a, std::vector<std::size_t> rows)
{
  if (a.shape().empty()) {
    throw ShapeError("gather_rows: scalar operand");
  }
  const std::size_t n = a.dim(0);
  const std::size_t width = n == 0 ? 0 : a.value().size() / n;
  for (auto r : rows) {
    if (r >= n) {
      throw ShapeError("gather_rows: row " + std::to_string(r) + " out of range for " + to_string(a.shape()));
    }
  }
  Shape out_shape = a.shape();
  out_shape[0] = rows.size();
  Array out(out_shape);
  const auto & v = a.value();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(v.data().begin() + rows[i] * width, width, out.data().begin() + i * width);
  }
  return make(Op::kGather, {a.ptr()}, std::move(out), [rows = std::move(rows), width](const Node &, const Array & g, std::span<Array *> gin) {
    auto & d = *gin[0];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t k = 0; k < width; ++k) {
        d[rows[i] * width + k] += g[i * width + k];
      }
    }
  });
}

Gradients backward(const Var & root)
{
  if (root.value().size() != 1) {
    throw ShapeError("backward: root must be scalar, got shape " + to_string(root.shape()));
  }
  Gradients result;
  if (!root.requires_grad()) {
    return result;
  }

  // Post-order over the differentiable subgraph.
  std::vector<Node *> order;
  std::unordered_map<const Node *, std::size_t> position;
  std::vector<std::pair<Node *, std::size_t>> stack;
  std::unordered_map<const Node *, bool> seen;
  stack.emplace_back(root.ptr().get(), 0);
  seen[root.node()] = true;
  while (!stack.empty()) {
    auto & [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node * child = node->inputs[next++].get();
      if (child->requires_grad && !seen[child]) {
        seen[child] = true;
        stack.emplace_back(child, 0);
      }
      continue;
    }
    position[node] = order.size();
    order.push_back(node);
    stack.pop_back();
  }

  std::vector<Array> grads(order.size());
  std::vector<bool> live(order.size(), false);
  grads.back() = Array(root.shape(), 1.0);
  live.back() = true;
  std::vector<Array *> gin;
  for (std::size_t i = order.size(); i-- > 0;) {
    Node * node = order[i];
    if (!live[i]) {
      continue;
    }
    if (node->op == Op::kLeaf) {
      result.grads_.emplace(node, std::move(grads[i]));
      continue;
    }
    gin.assign(node->inputs.size(), nullptr);
    for (std::size_t j = 0; j < node->inputs.size(); ++j) {
      const Node * in = node->inputs[j].get();
      if (!in->requires_grad) {
        continue;
      }
      const std::size_t k = position.at(in);
      if (!live[k]) {
        grads[k] = Array(in->value.shape(), 0.0);
        live[k] = true;
      }
      gin[j] = &grads[k];
    }
    node->backward(*node, grads[i], gin);
    grads[i] = Array();
  }
  return result;
}

}  // namespace eqf::nd
