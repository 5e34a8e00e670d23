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

#ifndef DYNALIGN_CONFIG_H_
#define DYNALIGN_CONFIG_H_

// Flat key = value run configuration. '#' starts a comment; list-valued keys
// take comma-separated values. Every key can be overridden through the
// environment as DYNALIGN_<KEY> (upper case). Unknown keys are rejected.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dynalign/alignment.h"
#include "dynalign/lstm_autoencoder.h"
#include "dynalign/rwr.h"
#include "dynalign/subspace.h"
#include "dynalign/synthetic.h"

namespace dynalign {

enum class ConsistencyKind { kLaplacian, kRwr };

struct RunConfig {
  // Snapshotting. Sweepable: num_snapshots, snapshot_interval.
  std::vector<int> num_snapshots = {5};
  std::vector<double> snapshot_interval = {0.0};  // 0 = window / M
  bool directed = false;
  bool cumulative = true;
  bool has_time_window = false;
  double time_start = 0.0;
  double time_end = 0.0;

  // Ego networks.
  double xi = 0.85;
  int omega = 3;
  int ego_width = 32;
  bool rwr_include_step_zero = false;

  // Autoencoders and subspace.
  int dual_dim = 128;
  int identity_dim = 128;
  double alpha = 0.1;
  double beta = 1.0;
  double gamma = 10.0;
  double learning_rate = 1e-3;
  double keep_prob = 0.8;
  double l2 = 1e-6;
  int epochs_per_round = 5;
  int pretrain_epochs = 100;
  int batch_size = 32;  // 0 = full batch
  int max_rounds = 20;
  double tol = 1e-5;
  double eps_div = 1e-12;
  double ridge = 1e-10;
  ConsistencyKind consistency = ConsistencyKind::kLaplacian;
  bool shared_init = true;

  // Evaluation.
  std::vector<int> ks = {1, 3, 5, 15};
  DistanceKind distance = DistanceKind::kEuclidean;
  bool exclude_train_targets = false;
  bool symmetric = false;

  // Synthetic data. Sweepable: lambda, eta.
  int n_base = 300;
  int synth_periods = 5;  // length of the generated timeline
  int growth = 2;
  double churn_add = 0.1;
  double churn_remove = 0.05;
  std::vector<double> lambda = {0.5};
  double edge_noise = 0.05;
  std::vector<double> eta = {0.1};

  std::uint64_t seed = 1;
  int repeats = 1;

  // Throws ConfigError on out-of-range values.
  void validate() const;
  // Sorted key = value lines; the hash is taken over this text.
  std::string canonical() const;
  std::string hash() const;

  bool is_sweep() const;

  RwrConfig rwr() const;
  TrainConfig train(std::uint64_t seed_offset = 0) const;
  ObjWeights weights() const;
  Schedule schedule() const;
  SynthConfig synth() const;  // first sweep values
  EvalModes eval_modes(bool static_ablation) const;
};

// Applies one key = value assignment. Throws ConfigError for unknown keys or
// unparsable values.
void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value);

RunConfig parse_config(std::istream& in);
// Reads the file, then applies environment overrides and validates.
RunConfig load_config(const std::string& path);
void apply_env_overrides(RunConfig& cfg);

}  // namespace dynalign

#endif  // DYNALIGN_CONFIG_H_
