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

#include "eqf/params.hpp"

#include <cmath>
#include <stdexcept>

namespace eqf
{

nd::Var ParamStore::add(const std::string & name, nd::Array init)
{
  if (contains(name)) {
    throw std::logic_error("duplicate parameter name " + name);
  }
  auto var = nd::Var::parameter(std::move(init));
  entries_.push_back({name, var});
  return var;
}

nd::Var ParamStore::get(const std::string & name) const
{
  for (const auto & e : entries_) {
    if (e.name == name) {
      return e.var;
    }
  }
  throw std::out_of_range("no parameter named " + name);
}

bool ParamStore::contains(const std::string & name) const
{
  for (const auto & e : entries_) {
    if (e.name == name) {
      return true;
    }
  }
  return false;
}

std::vector<nd::Var> ParamStore::vars() const { return vars_with_prefix(""); }

std::vector<nd::Var> ParamStore::vars_with_prefix(const std::string & prefix) const
{
  std::vector<nd::Var> out;
  for (const auto & e : entries_) {
    if (e.name.starts_with(prefix)) {
      out.push_back(e.var);
    }
  }
  return out;
}

std::size_t ParamStore::count() const { return count_with_prefix(""); }

std::size_t ParamStore::count_with_prefix(const std::string & prefix) const
{
  std::size_t n = 0;
  for (const auto & e : entries_) {
    if (e.name.starts_with(prefix)) {
      n += e.var.value().size();
    }
  }
  return n;
}

nd::Array fan_in_uniform(Rng & rng, nd::Shape shape, std::size_t fan_in)
{
  nd::Array a(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto & x : a.data()) {
    x = rng.uniform(-bound, bound);
  }
  return a;
}

nd::Var Linear::operator()(const nd::Var & x) const { return nd::matmul(x, weight) + bias; }

Linear make_linear(ParamStore & store, Rng & rng, const std::string & name, std::size_t in, std::size_t out)
{
  Linear l;
  l.weight = store.add(name + ".weight", fan_in_uniform(rng, {in, out}, in));
  l.bias = store.add(name + ".bias", fan_in_uniform(rng, {out}, in));
  return l;
}

nd::Var Mlp::operator()(const nd::Var & x) const
{
  nd::Var h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = layers[i](h);
    if (i + 1 < layers.size()) {
      h = nd::relu(h);
    }
  }
  return h;
}

Mlp make_mlp(ParamStore & store, Rng & rng, const std::string & name, const std::vector<std::size_t> & widths)
{
  if (widths.size() < 2) {
    throw std::invalid_argument("mlp " + name + " needs at least input and output widths");
  }
  Mlp m;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    m.layers.push_back(make_linear(store, rng, name + "." + std::to_string(i), widths[i], widths[i + 1]));
  }
  return m;
}

nd::Var quarter_turn(const nd::Var & z)
{
  const auto x = nd::slice(z, 1, 0, 1);
  const auto y = nd::slice(z, 1, 1, 1);
  return nd::concat({nd::affine(y, -1.0), x}, 1);
}

nd::Var channel_mean(const nd::Var & z) { return nd::mean(z, 2, true); }

nd::Var channel_norms(const nd::Var & z) { return nd::l2_norm(nd::transpose(z, {0, 2, 1})); }

nd::Var ChannelMix::operator()(const nd::Var & z) const
{
  if (z.shape().size() != 3 || z.dim(1) != 2 || z.dim(2) != aligned.dim(0)) {
    throw nd::ShapeError(
      "channel mix: expected [rows, 2, " + std::to_string(aligned.dim(0)) + "], got " + nd::to_string(z.shape()));
  }
  const std::size_t rows = z.dim(0);
  const std::size_t in = z.dim(2);
  const std::size_t out = aligned.dim(1);
  const auto flat = nd::reshape(z, {rows * 2, in});
  const auto a = nd::reshape(nd::matmul(flat, aligned), {rows, 2, out});
  const auto b = nd::reshape(nd::matmul(flat, turned), {rows, 2, out});
  return a + quarter_turn(b);
}

namespace
{

nd::Array small_noise(Rng & rng, std::size_t in, std::size_t out)
{
  nd::Array a({in, out});
  for (auto & x : a.data()) {
    x = rng.uniform(-0.01, 0.01);
  }
  return a;
}

}  // namespace

ChannelMix make_channel_mix(
  ParamStore & store, Rng & rng, const std::string & name, std::size_t in, std::size_t out, MixInit aligned_init)
{
  nd::Array aligned;
  switch (aligned_init) {
    case MixInit::kNearIdentity:
      aligned = small_noise(rng, in, out);
      for (std::size_t i = 0; i < std::min(in, out); ++i) {
        aligned.at({i, i}) += 1.0;
      }
      break;
    case MixInit::kSmall:
      aligned = small_noise(rng, in, out);
      break;
    case MixInit::kFanIn:
      aligned = fan_in_uniform(rng, {in, out}, in);
      break;
  }
  ChannelMix mix;
  mix.aligned = store.add(name + ".aligned", std::move(aligned));
  mix.turned = store.add(name + ".turned", small_noise(rng, in, out));
  return mix;
}

}  // namespace eqf
