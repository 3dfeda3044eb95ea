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

#include "eqf/nd/array.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqf::nd
{

std::size_t numel(const Shape & shape)
{
  std::size_t n = 1;
  for (auto d : shape) {
    n *= d;
  }
  return n;
}

std::string to_string(const Shape & shape)
{
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      os << ", ";
    }
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Array::Array(Shape shape, double fill) : shape_(std::move(shape)), data_(numel(shape_), fill) {}

Array::Array(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data))
{
  if (numel(shape_) != data_.size()) {
    throw ShapeError(
      "array shape " + to_string(shape_) + " does not match data length " +
      std::to_string(data_.size()));
  }
}

std::size_t Array::offset(std::initializer_list<std::size_t> index) const
{
  if (index.size() != shape_.size()) {
    throw ShapeError(
      "index of rank " + std::to_string(index.size()) + " into array of shape " +
      to_string(shape_));
  }
  std::size_t off = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) {
      throw std::out_of_range(
        "index " + std::to_string(i) + " out of range on axis " + std::to_string(axis) +
        " of shape " + to_string(shape_));
    }
    off = off * shape_[axis] + i;
    ++axis;
  }
  return off;
}

double & Array::at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }

double Array::at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

Array Array::reshaped(Shape shape) const
{
  if (numel(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  }
  return Array(std::move(shape), data_);
}

bool Array::all_finite() const noexcept
{
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<std::size_t> strides_of(const Shape & shape)
{
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * shape[i];
  }
  return strides;
}

Shape broadcast_shapes(const Shape & a, const Shape & b)
{
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank, 1);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::size_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw ShapeError("shapes " + to_string(a) + " and " + to_string(b) + " do not broadcast");
    }
    out[i] = da == 1 ? db : da;
  }
  return out;
}

namespace
{

template <typename Better>
std::vector<std::size_t> arg_extreme(const Array & a, std::size_t axis, Better better)
{
  if (axis >= a.rank()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " + to_string(a.shape()));
  }
  const std::size_t n = a.dim(axis);
  if (n == 0) {
    throw ShapeError("arg reduction over an empty axis of " + to_string(a.shape()));
  }
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) {
    outer *= a.dim(i);
  }
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < a.rank(); ++i) {
    inner *= a.dim(i);
  }
  std::vector<std::size_t> out(outer * inner, 0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * n * inner + in;
      std::size_t best = 0;
      for (std::size_t k = 1; k < n; ++k) {
        if (better(a[base + k * inner], a[base + best * inner])) {
          best = k;
        }
      }
      out[o * inner + in] = best;
    }
  }
  return out;
}

}  // namespace

std::vector<std::size_t> argmin(const Array & a, std::size_t axis)
{
  return arg_extreme(a, axis, [](double x, double y) { return x < y; });
}

std::vector<std::size_t> argmax(const Array & a, std::size_t axis)
{
  return arg_extreme(a, axis, [](double x, double y) { return x > y; });
}

}  // namespace eqf::nd
