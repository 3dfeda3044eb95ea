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

#ifndef EQF__ND__ARRAY_HPP_
#define EQF__ND__ARRAY_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqf::nd
{

using Shape = std::vector<std::size_t>;

/// Number of elements described by a shape. The empty shape is a scalar.
std::size_t numel(const Shape & shape);

/// Renders a shape as "[2, 3, 4]" for error messages.
std::string to_string(const Shape & shape);

/// Thrown whenever operand shapes do not conform to an operation.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/**
 * @brief Dense row-major array of doubles.
 *
 * The product of the shape always equals the data length.
 */
class Array
{
public:
  Array() : shape_{}, data_(1, 0.0) {}
  explicit Array(Shape shape, double fill = 0.0);
  Array(Shape shape, std::vector<double> data);

  static Array scalar(double value) { return Array(Shape{}, std::vector<double>{value}); }

  const Shape & shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double> & storage() noexcept { return data_; }
  const std::vector<double> & storage() const noexcept { return data_; }

  double & operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Multi-index access; bounds are checked.
  double & at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  /// Same data, new shape with the same element count.
  Array reshaped(Shape shape) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Array & a, const Array & b) = default;

private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> data_;
};

/// Row-major strides for a shape.
std::vector<std::size_t> strides_of(const Shape & shape);

/// Numpy-style right-aligned broadcast of two shapes.
Shape broadcast_shapes(const Shape & a, const Shape & b);

/**
 * @brief Index of the smallest entry along an axis, ties to the lowest index.
 *
 * Output has the input shape with `axis` removed, flattened row-major.
 */
std::vector<std::size_t> argmin(const Array & a, std::size_t axis);

/// Index of the largest entry along an axis, ties to the lowest index.
std::vector<std::size_t> argmax(const Array & a, std::size_t axis);

}  // namespace eqf::nd

#endif  // EQF__ND__ARRAY_HPP_
