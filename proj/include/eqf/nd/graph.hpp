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

#ifndef EQF__ND__GRAPH_HPP_
#define EQF__ND__GRAPH_HPP_

#include "eqf/nd/array.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

/**
 * Reverse-mode differentiation over dense double arrays.
 *
 * Every operation builds a new immutable Node holding its forward value and a
 * closure that maps the output gradient onto its inputs. Gradients are kept in
 * a per-call buffer inside backward(), so nodes (and the parameter leaves they
 * share) are never written during differentiation.
 */
namespace eqf::nd
{

enum class Op {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kAffine,
  kMatmul,
  kConcat,
  kSum,
  kMean,
  kRelu,
  kSigmoid,
  kLog,
  kSoftmax,
  kL2Norm,
  kDetach,
  kSlice,
  kReshape,
  kTranspose,
  kGather,
};

const char * op_name(Op op);

struct Node;
using NodePtr = std::shared_ptr<Node>;

/// Accumulates `grad_out` into the (possibly null) input gradient buffers.
using BackwardFn =
  std::function<void(const Node & self, const Array & grad_out, std::span<Array *> grad_in)>;

struct Node
{
  Op op{Op::kLeaf};
  std::vector<NodePtr> inputs;
  Array value;
  bool requires_grad{false};
  bool detached{false};
  BackwardFn backward;
};

/// Shared handle to a graph node.
class Var
{
public:
  Var() = default;
  explicit Var(NodePtr node) : node_(std::move(node)) {}

  static Var constant(Array value);
  static Var parameter(Array value);

  const Array & value() const { return node_->value; }
  /// Leaf values may be overwritten in place (optimizer steps, finite differences).
  Array & mutable_leaf_value();
  const Shape & shape() const { return node_->value.shape(); }
  std::size_t dim(std::size_t axis) const { return node_->value.dim(axis); }
  bool requires_grad() const { return node_->requires_grad; }
  Op op() const { return node_->op; }
  const Node * node() const { return node_.get(); }
  const NodePtr & ptr() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

private:
  NodePtr node_;
};

/// Result of a backward pass, keyed by parameter leaf.
class Gradients
{
public:
  /// Gradient for a parameter; all zeros when the parameter is unreachable.
  Array at(const Var & param) const;
  bool contains(const Var & param) const { return grads_.count(param.node()) > 0; }
  std::size_t size() const { return grads_.size(); }

private:
  friend Gradients backward(const Var & root);
  std::unordered_map<const Node *, Array> grads_;
};

/**
 * @brief Gradient of a scalar root with respect to every reachable parameter.
 *
 * Throws ShapeError when the root holds more than one element.
 */
Gradients backward(const Var & root);

// Element-wise arithmetic with numpy-style broadcasting.
Var add(const Var & a, const Var & b);
Var sub(const Var & a, const Var & b);
Var mul(const Var & a, const Var & b);
/// scale * a + shift
Var affine(const Var & a, double scale, double shift = 0.0);

/// [m, k] x [k, n] -> [m, n]
Var matmul(const Var & a, const Var & b);

Var concat(std::span<const Var> parts, std::size_t axis);
Var concat(std::initializer_list<Var> parts, std::size_t axis);

Var sum(const Var & a, std::size_t axis, bool keep_dim = false);
Var mean(const Var & a, std::size_t axis, bool keep_dim = false);
/// Sum of every element, as a scalar.
Var sum_all(const Var & a);

Var relu(const Var & a);
Var sigmoid(const Var & a);
/// log(max(a, floor)); the gradient is zero where the floor is active.
Var log(const Var & a, double floor = 0.0);
/// Softmax over the last axis.
Var softmax(const Var & a);
/// Euclidean norm over the last axis, which is removed. Zero vectors get a zero subgradient.
Var l2_norm(const Var & a);

/// Same value, no gradient flows to anything upstream.
Var detach(const Var & a);

Var slice(const Var & a, std::size_t axis, std::size_t start, std::size_t length);
Var reshape(const Var & a, Shape shape);
/// Axis permutation: output axis i is input axis perm[i].
Var transpose(const Var & a, std::vector<std::size_t> perm);
/// Rows of `a` along axis 0 picked by `rows`; repeated rows accumulate gradient.
Var gather_rows(const Var & a, std::vector<std::size_t> rows);

inline Var operator+(const Var & a, const Var & b) { return add(a, b); }
inline Var operator-(const Var & a, const Var & b) { return sub(a, b); }
inline Var operator*(const Var & a, const Var & b) { return mul(a, b); }

}  // namespace eqf::nd

#endif  // EQF__ND__GRAPH_HPP_
