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

#ifndef EQF__HARNESS__TRAINER_HPP_
#define EQF__HARNESS__TRAINER_HPP_

#include "eqf/data/scene_io.hpp"
#include "eqf/harness/checkpoint.hpp"
#include "eqf/predictor.hpp"

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqf::harness
{

/// Losses averaged over every valid agent seen during the epoch.
struct EpochLog
{
  std::size_t epoch{0};
  double combined{0.0};
  double trajectory{0.0};
  double probability{0.0};
  double seconds{0.0};
};

/// `epoch=.. loss=.. trajectory=.. probability=.. [seconds=..]`, values with 17 digits.
std::string format_epoch(const EpochLog & log, bool with_time = true);

struct TrainOptions
{
  /// Final checkpoint destination; empty skips writing.
  std::filesystem::path checkpoint_path;
  /// Receives each epoch's line as soon as it is complete.
  std::function<void(const EpochLog &)> on_epoch;
};

struct TrainResult
{
  std::vector<EpochLog> log;
  Checkpoint checkpoint;
};

/// Non-finite loss. The batch is also written next to the checkpoint path.
class NonFiniteLoss : public std::runtime_error
{
public:
  NonFiniteLoss(std::size_t epoch, std::size_t batch, std::vector<std::size_t> scenes);
  std::size_t epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }
  const std::vector<std::size_t> & scenes() const { return scenes_; }

private:
  std::size_t epoch_;
  std::size_t batch_;
  std::vector<std::size_t> scenes_;
};

/**
 * @brief Mini-batch Adam on the combined loss.
 *
 * Scene order is reshuffled every epoch by a generator seeded from the
 * configuration, so identical inputs give identical logs. Checkpoints go to
 * `<path>.epoch<N>` every `checkpoint_every` epochs and to `<path>` at the end.
 * Throws std::invalid_argument for an empty dataset, scenes without ground
 * truth, or shapes that disagree with the model.
 */
TrainResult train(Model & model, const std::vector<data::SceneRecord> & dataset, const TrainOptions & options = {});

/// Where the offending batch of a non-finite loss is recorded.
std::filesystem::path nan_report_path(const std::filesystem::path & checkpoint_path);

/// Throws std::invalid_argument naming the first scene whose shapes differ from `config`.
void check_dataset(const std::vector<data::SceneRecord> & dataset, const Config & config, bool need_truth);

}  // namespace eqf::harness

#endif  // EQF__HARNESS__TRAINER_HPP_
