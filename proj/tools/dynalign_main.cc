/*
 * Copyright 2026 The Dynalign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <string>

#include "CLI11.hpp"

#include "dynalign/pipeline.h"

int main(int argc, char** argv) {
  CLI::App app{"Dynamic social network alignment"};
  app.require_subcommand(1);

  dynalign::CommandLine cli;
  std::uint64_t seed = 0;

  auto* gen = app.add_subcommand("gen-synth", "Generate a planted synthetic instance");
  gen->add_option("--config", cli.config_path, "Config file")->required();
  gen->add_option("--out", cli.out_dir, "Output data directory")->required();
  gen->add_option("--seed", seed, "Override the config seed");

  auto* train = app.add_subcommand("train", "Train embeddings on a data directory");
  train->add_option("--config", cli.config_path, "Config file")->required();
  train->add_option("--data", cli.data_dir, "Data directory")->required();
  train->add_option("--out", cli.out_dir, "Output model directory")->required();
  train->add_option("--seed", seed, "Override the config seed");
  train->add_flag("--static-ablation", cli.static_ablation,
                  "Use only the final snapshot");

  auto* eval = app.add_subcommand("eval", "Rank and score a trained model");
  eval->add_option("--config", cli.config_path, "Config file")->required();
  eval->add_option("--model", cli.model_dir, "Model directory")->required();
  eval->add_option("--data", cli.data_dir, "Data directory")->required();
  eval->add_option("--out", cli.out_dir, "Output report directory")->required();
  eval->add_option("--seed", seed, "Override the config seed");
  eval->add_flag("--force", cli.force, "Ignore a data hash mismatch");

  auto* pipe = app.add_subcommand("pipeline", "gen-synth, train and eval in one go");
  pipe->add_option("--config", cli.config_path, "Config file")->required();
  pipe->add_option("--out", cli.out_dir, "Output directory")->required();
  pipe->add_option("--seed", seed, "Override the config seed");
  pipe->add_flag("--static-ablation", cli.static_ablation,
                 "Also train and score the final-snapshot ablation");
  pipe->add_flag("--force", cli.force, "Ignore a data hash mismatch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dynalign::kExitConfigError;
  }

  for (auto* sub : {gen, train, eval, pipe}) {
    if (sub->parsed()) {
      cli.command = sub->get_name();
      if (sub->count("--seed") > 0) cli.seed = seed;
    }
  }
  return dynalign::run_command(cli);
}
