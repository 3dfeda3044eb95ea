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

#include "eqf/config.hpp"
#include "eqf/data/csv_ingest.hpp"
#include "eqf/data/generator.hpp"
#include "eqf/data/scene_io.hpp"
#include "eqf/harness/checkpoint.hpp"
#include "eqf/harness/evaluate.hpp"
#include "eqf/harness/forecast_io.hpp"
#include "eqf/harness/svg_plot.hpp"
#include "eqf/harness/trainer.hpp"
#include "eqf/predictor.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace
{

using namespace eqf;

Config config_or_default(const std::string & path) { return path.empty() ? Config{} : load_config(path); }

void write_text(const std::string & path, const std::string & text)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << text;
}

int run_train(const std::string & config_path, const std::string & data_dir, const std::string & out, const std::string & log_path)
{
  const Config config = config_or_default(config_path);
  auto dataset = data::load_scene_dir(data_dir);
  std::cout << "training on " << dataset.size() << " scenes\n";
  Model model(config);
  std::cout << "parameters=" << model.params().count() << '\n';
  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path);
  }
  harness::TrainOptions options;
  options.checkpoint_path = out;
  options.on_epoch = [&](const harness::EpochLog & e) {
    const auto line = harness::format_epoch(e);
    std::cout << line << std::endl;
    if (log.is_open()) {
      log << line << '\n';
    }
  };
  try {
    harness::train(model, dataset, options);
  } catch (const harness::NonFiniteLoss & e) {
    std::cerr << e.what() << "; batch recorded in " << harness::nan_report_path(out).string() << '\n';
    return 3;
  }
  std::cout << "checkpoint written to " << out << '\n';
  return 0;
}

std::vector<std::size_t> default_horizons(std::size_t t_out)
{
  std::vector<std::size_t> out;
  for (std::size_t tau : {10, 20, 30}) {
    if (tau <= t_out) {
      out.push_back(tau);
    }
  }
  if (out.empty()) {
    out.push_back(t_out);
  }
  return out;
}

int run_eval(const std::string & ckpt, const std::string & data_dir, std::vector<std::size_t> taus, double miss_d, const std::string & out)
{
  const auto checkpoint = harness::load_checkpoint(ckpt);
  const Model model = harness::model_from(checkpoint);
  const auto dataset = data::load_scene_dir(data_dir);
  if (taus.empty()) {
    taus = default_horizons(model.config().t_out);
  }
  const double d = miss_d > 0.0 ? miss_d : model.config().miss_threshold;
  const auto ev = harness::evaluate(model, dataset, taus, d);
  const auto text = "scenes=" + std::to_string(dataset.size()) + "\n" + harness::format_evaluation(ev);
  std::cout << text;
  if (!out.empty()) {
    write_text(out, text);
  }
  return 0;
}

int run_predict(const std::string & ckpt, const std::string & scene_path, const std::string & out)
{
  const Model model = harness::model_from(harness::load_checkpoint(ckpt));
  const auto record = data::load_scene(scene_path);
  const auto forecast = eqf::forecast(model, record.scene);
  harness::save_forecast(out, harness::make_forecast_record(forecast, record.scene.agent_mask));
  std::cout << "forecast written to " << out << '\n';
  return 0;
}

int run_plot(const std::string & scene_path, const std::string & forecast_path, const std::string & out)
{
  const auto record = data::load_scene(scene_path);
  std::optional<harness::ForecastRecord> forecast;
  if (!forecast_path.empty()) {
    forecast = harness::load_forecast(forecast_path);
  }
  write_text(out, harness::render_svg(record, forecast));
  std::cout << "plot written to " << out << '\n';
  return 0;
}

int run_gen(const data::ScenarioSpec & spec, const std::string & config_path, std::size_t n, std::uint64_t seed, const std::string & out)
{
  const Config config = config_or_default(config_path);
  std::vector<data::SceneRecord> records;
  for (auto & g : data::generate_scenes(spec, config, n, seed)) {
    records.push_back(std::move(g.record));
  }
  data::save_scene_dir(out, records);
  std::cout << "wrote " << records.size() << " " << data::to_string(spec.kind) << " scenes to " << out << '\n';
  return 0;
}

int run_ingest(const std::string & csv, const std::string & config_path, const std::string & out)
{
  const Config config = config_or_default(config_path);
  const auto result = std::filesystem::is_directory(csv) ? data::ingest_csv_dir(csv, config)
                                                         : data::ingest_csv(csv, config);
  for (const auto & w : result.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  data::save_scene_dir(out, result.records);
  std::cout << "wrote " << result.records.size() << " scenes to " << out << ", skipped " << result.skipped << '\n';
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Multi-modal trajectory forecasting: training, evaluation, prediction and plotting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_dir;
  std::string out;
  std::string ckpt;
  std::string log_path;
  std::string scene_path;
  std::string forecast_path;
  std::vector<std::size_t> taus;
  double miss_d = 0.0;

  auto * train = app.add_subcommand("train", "Train a model and write a checkpoint");
  train->add_option("--config", config_path, "key=value configuration file (defaults when omitted)");
  train->add_option("--data", data_dir, "Directory of .scene files with ground truth")->required();
  train->add_option("--out", out, "Checkpoint path")->required();
  train->add_option("--log", log_path, "Also write the per-epoch log here");

  auto * eval = app.add_subcommand("eval", "Report minADE, minFDE and miss rate against the baseline");
  eval->add_option("--ckpt", ckpt, "Checkpoint path")->required();
  eval->add_option("--data", data_dir, "Directory of .scene files with ground truth")->required();
  eval->add_option("--tau", taus, "Horizons in steps")->delimiter(',');
  eval->add_option("--miss-d", miss_d, "Miss threshold in meters (checkpoint value when omitted)");
  eval->add_option("--out", out, "Also write the report here");

  auto * predict = app.add_subcommand("predict", "Forecast one scene file");
  predict->add_option("--ckpt", ckpt, "Checkpoint path")->required();
  predict->add_option("--scene", scene_path, "Scene file")->required();
  predict->add_option("--out", out, "Forecast file")->required();

  auto * plot = app.add_subcommand("plot", "Render a scene and forecast to SVG");
  plot->add_option("--scene", scene_path, "Scene file")->required();
  plot->add_option("--forecast", forecast_path, "Forecast file (history only when omitted)");
  plot->add_option("--out", out, "SVG path")->required();

  data::ScenarioSpec spec;
  std::string kind = "fork";
  std::size_t n = 100;
  std::uint64_t seed = 0;
  auto * gen = app.add_subcommand("gen", "Generate synthetic scenes");
  gen->add_option("--kind", kind, "straight, left-turn, right-turn or fork");
  gen->add_option("--n", n, "Number of scenes");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--modes", spec.modes, "Fork mode count");
  gen->add_option("--speed", spec.speed, "Ego speed in m/s");
  gen->add_option("--radius", spec.turn_radius, "Turn radius in meters");
  gen->add_option("--noise", spec.noise, "Position noise std-dev in meters");
  gen->add_option("--config", config_path, "Configuration supplying A, T_in, T_out, L, K and the rate");
  gen->add_option("--out", out, "Output directory")->required();

  std::string csv;
  auto * ingest = app.add_subcommand("ingest", "Convert trajectory CSV files to scene files");
  ingest->add_option("--csv", csv, "CSV file or directory")->required();
  ingest->add_option("--config", config_path, "Configuration supplying the grid and sizes");
  ingest->add_option("--out", out, "Output directory")->required();

  auto * params = app.add_subcommand("params", "Print the parameter count of a configuration");
  params->add_option("--config", config_path, "Configuration (defaults when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      return run_train(config_path, data_dir, out, log_path);
    }
    if (*eval) {
      return run_eval(ckpt, data_dir, taus, miss_d, out);
    }
    if (*predict) {
      return run_predict(ckpt, scene_path, out);
    }
    if (*plot) {
      return run_plot(scene_path, forecast_path, out);
    }
    if (*gen) {
      spec.kind = data::parse_scenario_kind(kind);
      return run_gen(spec, config_path, n, seed, out);
    }
    if (*ingest) {
      return run_ingest(csv, config_path, out);
    }
    if (*params) {
      const Model model(config_or_default(config_path));
      std::cout << "parameters=" << model.params().count() << '\n';
      return 0;
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
