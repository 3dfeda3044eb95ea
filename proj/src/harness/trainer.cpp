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

#include "eqf/harness/trainer.hpp"

#include "eqf/objective.hpp"
#include "eqf/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

namespace eqf::harness
{

namespace
{

/// Separates the shuffling stream from parameter initialization.
constexpr std::uint64_t kShuffleSalt = 0x5eedf00dULL;

struct Minibatch
{
  SceneBatch scenes;
  nd::Array futures;  //!< [B*A, T_out, 2]
  std::vector<bool> mask;
};

Minibatch assemble(const std::vector<data::SceneRecord> & dataset, std::span<const std::size_t> indices)
{
  std::vector<Scene> scenes;
  scenes.reserve(indices.size());
  const std::size_t agents = dataset[indices[0]].scene.agents();
  const std::size_t t_out = dataset[indices[0]].truth->t_out();
  std::vector<double> futures;
  futures.reserve(indices.size() * agents * t_out * 2);
  Minibatch mb;
  for (std::size_t i : indices) {
    scenes.push_back(dataset[i].scene);
    const auto & truth = *dataset[i].truth;
    futures.insert(futures.end(), truth.futures.data().begin(), truth.futures.data().end());
    mb.mask.insert(mb.mask.end(), truth.agent_mask.begin(), truth.agent_mask.end());
  }
  mb.scenes = SceneBatch::from(scenes);
  mb.futures = nd::Array({indices.size() * agents, t_out, 2}, std::move(futures));
  return mb;
}

std::string checkpoint_name(const std::filesystem::path & path, std::size_t epoch)
{
  return path.string() + ".epoch" + std::to_string(epoch);
}

}  // namespace

std::string format_epoch(const EpochLog & log, bool with_time)
{
  std::string s = "epoch=" + std::to_string(log.epoch) + " loss=" + format_double(log.combined) +
                  " trajectory=" + format_double(log.trajectory) + " probability=" + format_double(log.probability);
  if (with_time) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", log.seconds);
    s += std::string(" seconds=") + buf;
  }
  return s;
}

NonFiniteLoss::NonFiniteLoss(std::size_t epoch, std::size_t batch, std::vector<std::size_t> scenes)
: std::runtime_error(
    "non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch)),
  epoch_(epoch),
  batch_(batch),
  scenes_(std::move(scenes))
{
}

std::filesystem::path nan_report_path(const std::filesystem::path & checkpoint_path)
{
  return checkpoint_path.string() + ".nan.txt";
}

void check_dataset(const std::vector<data::SceneRecord> & dataset, const Config & config, bool need_truth)
{
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto & r = dataset[i];
    const auto & s = r.scene;
    const std::size_t t_out = r.truth ? r.truth->t_out() : r.t_out;
    if (s.agents() != config.agents || s.t_in() != config.t_in || s.lanes() != config.lanes ||
        s.lane_points() != config.lane_points || t_out != config.t_out) {
      throw std::invalid_argument(
        "scene " + std::to_string(i) + " has shape (A=" + std::to_string(s.agents()) + ", T_in=" +
        std::to_string(s.t_in()) + ", T_out=" + std::to_string(t_out) + ", L=" + std::to_string(s.lanes()) +
        ", K=" + std::to_string(s.lane_points()) + ") but the model expects (A=" + std::to_string(config.agents) +
        ", T_in=" + std::to_string(config.t_in) + ", T_out=" + std::to_string(config.t_out) + ", L=" +
        std::to_string(config.lanes) + ", K=" + std::to_string(config.lane_points) + ")");
    }
    if (need_truth && !r.truth) {
      throw std::invalid_argument("scene " + std::to_string(i) + " has no ground truth");
    }
    if (r.truth && r.truth->agent_mask != s.agent_mask) {
      throw std::invalid_argument("scene " + std::to_string(i) + " ground truth mask differs from the scene mask");
    }
  }
}

TrainResult train(Model & model, const std::vector<data::SceneRecord> & dataset, const TrainOptions & options)
{
  const Config & config = model.config();
  if (dataset.empty()) {
    throw std::invalid_argument("train: empty dataset");
  }
  check_dataset(dataset, config, true);

  const auto params = model.params().vars();
  AdamState adam = make_adam_state(params);
  const AdamOptions adam_options{config.learning_rate};
  Rng rng(config.seed ^ kShuffleSalt);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    rng.shuffle(order);
    double traj_sum = 0.0;
    double prob_sum = 0.0;
    std::size_t agents = 0;
    for (std::size_t b = 0, first = 0; first < order.size(); ++b, first += config.batch_size) {
      const auto indices =
        std::span<const std::size_t>(order).subspan(first, std::min(config.batch_size, order.size() - first));
      const auto mb = assemble(dataset, indices);
      if (std::count(mb.mask.begin(), mb.mask.end(), true) == 0) {
        continue;
      }
      const auto out = model.forward(mb.scenes);
      const auto terms = loss_terms(out.trajectories, out.probabilities, mb.futures, mb.mask, config.beta);
      const double loss = terms.combined.value()[0];
      if (!std::isfinite(loss)) {
        std::vector<std::size_t> scenes(indices.begin(), indices.end());
        if (!options.checkpoint_path.empty()) {
          std::ofstream report(nan_report_path(options.checkpoint_path));
          report << "epoch " << epoch << "\nbatch " << b << "\nscenes";
          for (std::size_t s : scenes) {
            report << ' ' << s;
          }
          report << '\n';
        }
        throw NonFiniteLoss(epoch, b, std::move(scenes));
      }
      adam_step(params, nd::backward(terms.combined), adam, adam_options);
      const auto n = static_cast<double>(terms.valid_agents);
      traj_sum += terms.trajectory.value()[0] * n;
      prob_sum += terms.probability.value()[0] * n;
      agents += terms.valid_agents;
    }

    EpochLog log;
    log.epoch = epoch;
    const double n = static_cast<double>(std::max<std::size_t>(agents, 1));
    log.trajectory = traj_sum / n;
    log.probability = prob_sum / n;
    log.combined = config.beta * log.trajectory + (1.0 - config.beta) * log.probability;
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(log);
    if (options.on_epoch) {
      options.on_epoch(log);
    }
    if (!options.checkpoint_path.empty() && config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0 &&
        epoch < config.epochs) {
      save_checkpoint(checkpoint_name(options.checkpoint_path, epoch), snapshot(model, adam, epoch));
    }
  }
  result.checkpoint = snapshot(model, adam, config.epochs);
  if (!options.checkpoint_path.empty()) {
    save_checkpoint(options.checkpoint_path, result.checkpoint);
  }
  return result;
}

}  // namespace eqf::harness
