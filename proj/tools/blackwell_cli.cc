// Copyright 2026 The Blackwell Approachability Authors.
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

// Command-line driver: simulate, verify, or sweep the approachability
// strategy for the Big Match.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "blackwell/harness.h"

int main(int argc, char** argv) {
  namespace h = blackwell::harness;
  h::ExperimentConfig config;
  std::string mode = "verify";
  std::string format = "json";
  std::string grid;

  CLI::App app{"Blackwell approachability strategy for the Big Match"};
  app.add_option("--epsilon", config.epsilon, "epsilon in (0, 1]")
      ->capture_default_str();
  app.add_option("--horizon", config.horizon, "number of stages T")
      ->capture_default_str();
  app.add_option("--trials", config.trials, "number of trajectories")
      ->capture_default_str();
  app.add_option("--seed", config.master_seed, "master seed")
      ->capture_default_str();
  app.add_option("--adversary", config.adversary,
                 "zero | one | iid:<q> | periodic:<bits> | spiteful | mixed")
      ->capture_default_str();
  app.add_option("--mode", mode, "simulate | verify | sweep")
      ->capture_default_str();
  app.add_option("--out", config.output_path, "output file");
  app.add_option("--format", format, "csv | json")->capture_default_str();
  app.add_flag("--break-oracle", config.break_oracle,
               "replace the oracle with one that always plays 0");
  app.add_option("--grid", grid, "sweep points, e.g. 0.6:64,0.05:100000");
  app.add_option("--trajectory-csv", config.trajectory_csv,
                 "simulate: write trial 0's stage records here");
  app.add_option("--runner-log", config.runner_log_csv,
                 "simulate: write trial 0's approachability log here");
  app.add_option("--threads", config.threads, "worker threads (0 = all cores)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return h::kExitConfigError;
  }

  try {
    config.mode = h::ParseMode(mode);
    config.format = h::ParseFormat(format);
    if (!grid.empty()) config.grid = h::ParseGrid(grid);
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return h::kExitConfigError;
  }
  return h::Execute(config, std::cout, std::cerr);
}
