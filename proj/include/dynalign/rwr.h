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

#ifndef DYNALIGN_RWR_H_
#define DYNALIGN_RWR_H_

// Truncated random walk with restart and the per-user ego tensor built on it.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dynalign/graph.h"

namespace dynalign {

struct RwrConfig {
  double xi = 0.85;  // probability of not restarting, in [0, 1)
  int omega = 3;     // number of walk steps, >= 1
  // Adds the one-hot step-0 term to the sum.
  bool include_step_zero = false;

  void validate() const;
};

// r = sum_{k=1..omega} r^(k), r^(k) = xi r^(k-1) D^-1 G + (1 - xi) e_start.
// Rows of G with zero out-degree send their mass back to `start`.
Eigen::VectorXd rwr_scores(const SparseMatrix& graph, int start,
                           const RwrConfig& cfg);

inline constexpr int kPad = -1;

// Top-`width` users by score, `start` excluded, ties by ascending index. Slots
// beyond the number of strictly positive scores hold kPad.
std::vector<int> select_ego(const Eigen::VectorXd& scores, int start,
                            int width);

// X in R^{N x W x M}, stored as M slices of N x W.
struct EgoTensor {
  int num_users = 0;
  int width = 0;
  std::vector<std::vector<int>> ego_indices;  // per user, length width
  std::vector<Eigen::MatrixXd> slices;        // per snapshot, N x W

  int num_snapshots() const { return static_cast<int>(slices.size()); }
};

// Ego friends are fixed once on the decay-aggregated graph; slice m holds the
// scores from the walk on snapshot m at those friends (zero at kPad).
EgoTensor build_ego_tensor(const DynamicGraph& graph, const RwrConfig& cfg,
                           int width);

// Row i holds rwr_scores(graph, i); diagonal dropped. Used for the
// proximity-weighted consistency variant.
SparseMatrix rwr_proximity_matrix(const SparseMatrix& graph,
                                  const RwrConfig& cfg);

// Cache file keyed by (graph hash, xi, omega, width). Text format:
//   dynalign-ego 1 <graph_hash> <xi> <omega> <width>
//   N M W
//   N lines of ego indices
//   M*N lines of row-major scores
struct EgoCacheKey {
  std::uint64_t graph_hash = 0;
  double xi = 0.0;
  int omega = 0;
  int width = 0;
  friend bool operator==(const EgoCacheKey&, const EgoCacheKey&) = default;
};

std::uint64_t hash_graph(const DynamicGraph& graph);
void write_ego_cache(std::ostream& out, const EgoCacheKey& key,
                     const EgoTensor& ego);
// Returns false if the stored key differs from `key`; throws DataError on a
// malformed file.
bool read_ego_cache(std::istream& in, const EgoCacheKey& key, EgoTensor& ego);

}  // namespace dynalign

#endif  // DYNALIGN_RWR_H_
