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

#ifndef DYNALIGN_GRAPH_H_
#define DYNALIGN_GRAPH_H_

// Dynamic social graphs as sequences of adjacency snapshots, plus the anchor
// bookkeeping that ties a source graph to a target graph.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dynalign {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// One adjacency snapshot. Weights are nonnegative, indices lie in
// [0, num_users) and each (i, j) appears at most once.
class SnapshotGraph {
 public:
  explicit SnapshotGraph(int num_users = 0);
  // Throws DataError on out-of-range indices, negative or non-finite weights
  // and duplicate (i, j) entries.
  SnapshotGraph(int num_users, const std::vector<Triplet>& edges);
  explicit SnapshotGraph(SparseMatrix adjacency);

  int num_users() const { return static_cast<int>(adjacency_.rows()); }
  std::int64_t num_edges() const { return adjacency_.nonZeros(); }
  const SparseMatrix& adjacency() const { return adjacency_; }
  double weight(int i, int j) const { return adjacency_.coeff(i, j); }

 private:
  SparseMatrix adjacency_;
};

// The graph tensor: M >= 1 snapshots over a common user set.
class DynamicGraph {
 public:
  DynamicGraph(int num_users, std::vector<SnapshotGraph> snapshots);

  int num_users() const { return num_users_; }
  int num_snapshots() const { return static_cast<int>(snapshots_.size()); }
  const SnapshotGraph& snapshot(int m) const { return snapshots_.at(m); }
  const std::vector<SnapshotGraph>& snapshots() const { return snapshots_; }

  // Multiplies every weight by c >= 0.
  DynamicGraph scaled(double c) const;
  // Keeps only the final snapshot (M = 1).
  DynamicGraph last_snapshot_only() const;

 private:
  int num_users_;
  std::vector<SnapshotGraph> snapshots_;
};

enum class EdgeOp { kAdd, kRemove };

struct EdgeEvent {
  int src = 0;
  int dst = 0;
  double timestamp = 0.0;
  double weight = 1.0;
  EdgeOp op = EdgeOp::kAdd;
};

struct IngestOptions {
  int num_snapshots = 1;
  double t_start = 0.0;
  double t_end = 1.0;
  bool directed = false;
  // Cumulative snapshots hold the live edge state at the end of each
  // sub-interval. Interval-scoped snapshots hold only edges whose add fell
  // inside the sub-interval and that were still alive at its end.
  bool cumulative = true;
  // Events earlier than t_start seed the state before the first snapshot
  // instead of being rejected. Events after t_end are still rejected.
  bool fold_history = false;
};

struct IngestResult {
  DynamicGraph graph;
  // Removes of edges that were not present.
  std::size_t ignored_removes = 0;
};

// Splits [t_start, t_end] into M equal sub-intervals and replays the events in
// timestamp order (ties keep input order). The final sub-interval is closed on
// the right. Throws DataError for timestamps outside the window, invalid
// indices and negative weights; ConfigError for an empty window or M < 1.
IngestResult ingest_edge_events(const std::vector<EdgeEvent>& events,
                                int num_users, const IngestOptions& options);

// Sum over m of exp(m - M) * G^m (m is 1-based), so the last snapshot has
// weight one.
SparseMatrix aggregate_with_decay(const DynamicGraph& graph);

// Symmetrizes A <- (A + A^T) / 2 and returns diag(row sums) - A.
SparseMatrix laplacian(const SparseMatrix& adjacency);

// Row a of the pair selects source user k_a and target user l_a.
struct AnchorPair {
  int source = 0;
  int target = 0;
  friend bool operator==(const AnchorPair&, const AnchorPair&) = default;
};

using AnchorSet = std::vector<AnchorPair>;

// Gather/scatter form of the binary indication matrices P^s and P^t.
class IndicationPair {
 public:
  IndicationPair() = default;
  // Throws DataError naming the offending pair for out-of-range indices or
  // repeated source/target users.
  IndicationPair(const AnchorSet& anchors, int source_width, int target_width);

  int size() const { return static_cast<int>(rows_.size()); }
  int source_width() const { return source_width_; }
  int target_width() const { return target_width_; }
  const AnchorSet& rows() const { return rows_; }

  // P^s X and P^t X.
  Eigen::MatrixXd gather_source(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd gather_target(const Eigen::MatrixXd& x) const;

  // Same pair seen from the target network (source and target swapped).
  IndicationPair reversed() const;

 private:
  AnchorSet rows_;
  int source_width_ = 0;
  int target_width_ = 0;
};

IndicationPair build_indication(const AnchorSet& anchors, int source_width,
                                int target_width);

}  // namespace dynalign

#endif  // DYNALIGN_GRAPH_H_
