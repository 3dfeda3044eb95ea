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

#include "eqf/map_encoder.hpp"

#include "eqf/geometry.hpp"

#include <cmath>

namespace eqf
{

namespace
{

constexpr double kMaskedScore = -1e9;

std::size_t lane_input_width(MapMode mode, std::size_t points)
{
  return mode == MapMode::kRaw ? 2 * points : 2 * points - 3;
}

}  // namespace

MapEncoder::MapEncoder(ParamStore & store, Rng & rng, const Config & config)
: mode_(config.map_mode), hidden_(config.hidden)
{
  if (mode_ == MapMode::kNone) {
    return;
  }
  const std::size_t d = config.hidden;
  lane_mlp_ = make_mlp(store, rng, "map.lane", {lane_input_width(mode_, config.lane_points), d, d});
  query_ = make_linear(store, rng, "map.query", d, d);
  key_ = make_linear(store, rng, "map.key", d, d);
  value_ = make_linear(store, rng, "map.value", d, d);
}

nd::Array MapEncoder::lane_inputs(const SceneBatch & batch) const
{
  const std::size_t rows = batch.scenes * batch.lanes;
  const std::size_t k = batch.lane_points;
  const std::size_t width = lane_input_width(mode_, k);
  nd::Array out({rows, width});
  const auto & map = batch.map.data();
  if (mode_ == MapMode::kRaw) {
    for (std::size_t s = 0; s < batch.scenes; ++s) {
      double cx = 0.0;
      double cy = 0.0;
      std::size_t n = 0;
      for (std::size_t l = s * batch.lanes; l < (s + 1) * batch.lanes; ++l) {
        if (!batch.lane_mask[l]) {
          continue;
        }
        for (std::size_t p = 0; p < k; ++p) {
          cx += map[(l * k + p) * 2];
          cy += map[(l * k + p) * 2 + 1];
        }
        n += k;
      }
      if (n > 0) {
        cx /= static_cast<double>(n);
        cy /= static_cast<double>(n);
      }
      for (std::size_t l = s * batch.lanes; l < (s + 1) * batch.lanes; ++l) {
        if (!batch.lane_mask[l]) {
          continue;
        }
        for (std::size_t p = 0; p < k; ++p) {
          out[l * width + 2 * p] = map[(l * k + p) * 2] - cx;
          out[l * width + 2 * p + 1] = map[(l * k + p) * 2 + 1] - cy;
        }
      }
    }
  } else {
    for (std::size_t l = 0; l < rows; ++l) {
      if (!batch.lane_mask[l]) {
        continue;
      }
      shape_descriptors(map.subspan(l * k * 2, k * 2), out.data().subspan(l * width, width));
    }
  }
  return out;
}

MapEncoding MapEncoder::encode(const SceneBatch & batch) const
{
  MapEncoding enc;
  if (mode_ == MapMode::kNone) {
    enc.feature = nd::Var::constant(nd::Array({batch.scenes, hidden_}));
    return enc;
  }
  const std::size_t rows = batch.scenes * batch.lanes;

  // Keys are restricted to valid lanes of the query's own scene.
  nd::Array bias({rows, rows}, kMaskedScore);
  nd::Array pool({batch.scenes, rows});
  for (std::size_t s = 0; s < batch.scenes; ++s) {
    std::size_t valid = 0;
    for (std::size_t l = s * batch.lanes; l < (s + 1) * batch.lanes; ++l) {
      valid += batch.lane_mask[l] ? 1 : 0;
    }
    for (std::size_t q = s * batch.lanes; q < (s + 1) * batch.lanes; ++q) {
      for (std::size_t l = s * batch.lanes; l < (s + 1) * batch.lanes; ++l) {
        if (batch.lane_mask[l]) {
          bias[q * rows + l] = 0.0;
        }
      }
      if (batch.lane_mask[q]) {
        pool[s * rows + q] = 1.0 / static_cast<double>(valid);
      }
    }
  }

  const auto tokens = lane_mlp_(nd::Var::constant(lane_inputs(batch)));
  const auto q = query_(tokens);
  const auto k = key_(tokens);
  const auto v = value_(tokens);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden_));
  const auto scores = nd::affine(nd::matmul(q, nd::transpose(k, {1, 0})), scale) + nd::Var::constant(std::move(bias));
  const auto attention = nd::softmax(scores);
  enc.attention = attention.value();
  enc.feature = nd::matmul(nd::Var::constant(std::move(pool)), nd::matmul(attention, v));
  return enc;
}

}  // namespace eqf
