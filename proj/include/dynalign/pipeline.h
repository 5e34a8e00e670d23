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

#ifndef DYNALIGN_PIPELINE_H_
#define DYNALIGN_PIPELINE_H_

// End-to-end commands: synthetic data generation, training, evaluation and
// the combined pipeline with repeats and sweeps.
//
// Data directory:  source_events.txt target_events.txt source_ids.txt
//                  target_ids.txt anchors_train.txt anchors_test.txt
//                  manifest.json
// Model directory: model.json params_{s,t}.txt V_{s,t}.csv Q_{s,t}.csv
//                  U_{s,t}.csv trace.csv
// Eval directory:  report.json candidates.csv

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynalign/alignment.h"
#include "dynalign/config.h"
#include "dynalign/event_io.h"
#include "dynalign/graph.h"
#include "dynalign/subspace.h"

namespace dynalign {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitDataError = 2,
  kExitNumericalAbort = 3,
};

struct LoadedData {
  IdMap source_ids, target_ids;
  std::vector<EdgeEvent> events_s, events_t;
  AnchorSet train, test;
  double t_start = 0.0;
  double t_end = 0.0;
  std::string data_hash;
};

// Reads a data directory. The time window comes from the config when set,
// else from the manifest, else from the event timestamps.
LoadedData load_data(const RunConfig& cfg, const std::string& data_dir);
std::string hash_data_dir(const std::string& data_dir);

// Snapshots for one network under the config's first M and interval. With
// static_ablation only the final cumulative snapshot is kept.
DynamicGraph snapshot_network(const RunConfig& cfg, const LoadedData& data,
                              bool source, bool static_ablation);

struct GenSummary {
  int num_source = 0;
  int num_target = 0;
  int num_truth = 0;
  double overlap = 0.0;
  std::string data_hash;
};

GenSummary cmd_gen_synth(const RunConfig& cfg, const std::string& out_dir);

struct TrainSummary {
  int rounds = 0;
  bool converged = false;
  double final_objective = 0.0;
  std::vector<TraceRow> trace;
};

// Throws NumericalError (DivergenceError) on numerical abort; the trace so
// far is still written to out_dir/trace.csv.
TrainSummary cmd_train(const RunConfig& cfg, const std::string& data_dir,
                       const std::string& out_dir, bool static_ablation);

struct EvalSummary {
  std::vector<EvalEntry> entries;
  double overlap = 0.0;
  bool static_ablation = false;
};

// Refuses a model trained on different data unless `force`.
EvalSummary cmd_eval(const RunConfig& cfg, const std::string& model_dir,
                     const std::string& data_dir, const std::string& out_dir,
                     bool force);

struct PipelineRun {
  std::string label;
  double lambda = 0.0;
  double eta = 0.0;
  int num_snapshots = 0;
  double snapshot_interval = 0.0;
  std::uint64_t seed = 0;
  EvalSummary dynamic;
  std::optional<EvalSummary> static_run;
};

// gen-synth -> train -> eval for every sweep point and repeat (seed + r).
// A single run writes data/, model/, eval/ (and model_static/,
// eval_static/) under out_dir; several runs go to runs/<label>/ with
// sweep.csv and summary.json on top.
std::vector<PipelineRun> cmd_pipeline(const RunConfig& cfg,
                                      const std::string& out_dir,
                                      bool static_ablation, bool force);

struct CommandLine {
  std::string command;  // gen-synth | train | eval | pipeline
  std::string config_path;
  std::string out_dir;
  std::string data_dir;
  std::string model_dir;
  std::optional<std::uint64_t> seed;
  bool static_ablation = false;
  bool force = false;
};

// Loads the config, runs the command and maps failures to exit codes.
int run_command(const CommandLine& cli);

}  // namespace dynalign

#endif  // DYNALIGN_PIPELINE_H_
