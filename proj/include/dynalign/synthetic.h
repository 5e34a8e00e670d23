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

#ifndef DYNALIGN_SYNTHETIC_H_
#define DYNALIGN_SYNTHETIC_H_

// Planted-truth benchmark instances: a growing base network observed through
// two noisy, partially overlapping views with known anchors.

#include <cstdint>
#include <vector>

#include "dynalign/graph.h"

namespace dynalign {

struct SynthConfig {
  int n_base = 300;
  int num_snapshots = 5;
  int growth = 2;              // edges attached by each arriving user
  double churn_add = 0.1;      // new edges per live edge per snapshot
  double churn_remove = 0.05;  // removal probability per live edge per snapshot
  double lambda = 0.5;         // overlap rate 2A / (S + T)
  double edge_noise = 0.05;    // per-view, per-snapshot edge flip probability
  double eta = 0.1;            // fraction of true anchors used for training
  std::uint64_t seed = 1;

  void validate() const;
};

// Events live in [0, M]; snapshot m covers [m - 1, m).
struct SyntheticBase {
  std::vector<EdgeEvent> events;  // undirected, src < dst
  DynamicGraph graph;
};

// Preferential-attachment growth: users arrive at sorted uniform times, each
// attaching to min(growth, #present) distinct earlier users with probability
// proportional to degree + 1. Each snapshot interval then removes live edges
// with probability churn_remove and adds Binomial(#live, churn_add) edges
// closing triangles where possible.
SyntheticBase generate_base(const SynthConfig& cfg);

struct ViewSizes {
  int view_users = 0;    // S = T
  int shared_users = 0;  // A
};

// S = floor(n_base / (2 - lambda)), A = round(lambda * S). Throws ConfigError
// when lambda is infeasible for n_base.
ViewSizes view_sizes(int n_base, double lambda);

struct PlantedInstance {
  int num_source = 0;
  int num_target = 0;
  std::vector<EdgeEvent> events_s, events_t;  // view-local ids
  DynamicGraph g_s, g_t;
  AnchorSet truth;  // sorted by source index
  AnchorSet train_anchors;
  AnchorSet test_anchors;
  std::vector<int> base_of_source, base_of_target;  // view id -> base id
};

// Samples the two user subsets, relabels each view with an independent
// shuffle, perturbs every snapshot of each view independently (each edge
// dropped with probability edge_noise, and as many spurious edges added in
// expectation), re-derives edge events from consecutive snapshots and splits
// the truth into train (fraction eta) and test.
PlantedInstance split_views(const SyntheticBase& base, const SynthConfig& cfg);

inline PlantedInstance generate_instance(const SynthConfig& cfg) {
  return split_views(generate_base(cfg), cfg);
}

}  // namespace dynalign

#endif  // DYNALIGN_SYNTHETIC_H_
