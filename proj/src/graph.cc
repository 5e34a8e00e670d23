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

#include "dynalign/graph.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "dynalign/errors.h"

namespace dynalign {
namespace {

std::string pair_name(int i, int j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

SparseMatrix from_edge_map(int num_users,
                           const std::map<std::pair<int, int>, double>& edges) {
  std::vector<Triplet> triplets;
  triplets.reserve(edges.size());
  for (const auto& [key, w] : edges) {
    triplets.emplace_back(key.first, key.second, w);
  }
  SparseMatrix m(num_users, num_users);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

SnapshotGraph::SnapshotGraph(int num_users) : adjacency_(num_users, num_users) {
  if (num_users < 0) throw DataError("negative user count");
}

SnapshotGraph::SnapshotGraph(int num_users, const std::vector<Triplet>& edges)
    : SnapshotGraph(num_users) {
  std::map<std::pair<int, int>, double> seen;
  for (const Triplet& t : edges) {
    const int i = static_cast<int>(t.row());
    const int j = static_cast<int>(t.col());
    if (i < 0 || j < 0 || i >= num_users || j >= num_users) {
      throw DataError("edge " + pair_name(i, j) + " out of range for " +
                      std::to_string(num_users) + " users");
    }
    if (!(t.value() >= 0.0) || !std::isfinite(t.value())) {
      throw DataError("edge " + pair_name(i, j) + " has invalid weight");
    }
    if (!seen.emplace(std::make_pair(i, j), t.value()).second) {
      throw DataError("duplicate edge " + pair_name(i, j));
    }
  }
  adjacency_ = from_edge_map(num_users, seen);
}

SnapshotGraph::SnapshotGraph(SparseMatrix adjacency)
    : adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != adjacency_.cols()) {
    throw DataError("adjacency must be square");
  }
  adjacency_.makeCompressed();
  for (int k = 0; k < adjacency_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(adjacency_, k); it; ++it) {
      if (!(it.value() >= 0.0) || !std::isfinite(it.value())) {
        throw DataError("edge " + pair_name(static_cast<int>(it.row()),
                                            static_cast<int>(it.col())) +
                        " has invalid weight");
      }
    }
  }
}

DynamicGraph::DynamicGraph(int num_users, std::vector<SnapshotGraph> snapshots)
    : num_users_(num_users), snapshots_(std::move(snapshots)) {
  if (snapshots_.empty()) throw DataError("a dynamic graph needs M >= 1");
  for (const SnapshotGraph& s : snapshots_) {
    if (s.num_users() != num_users_) {
      throw DataError("snapshot user count mismatch");
    }
  }
}

DynamicGraph DynamicGraph::scaled(double c) const {
  std::vector<SnapshotGraph> out;
  out.reserve(snapshots_.size());
  for (const SnapshotGraph& s : snapshots_) {
    out.emplace_back(SparseMatrix(c * s.adjacency()));
  }
  return DynamicGraph(num_users_, std::move(out));
}

DynamicGraph DynamicGraph::last_snapshot_only() const {
  return DynamicGraph(num_users_, {snapshots_.back()});
}

IngestResult ingest_edge_events(const std::vector<EdgeEvent>& events,
                                int num_users, const IngestOptions& options) {
  const int m_count = options.num_snapshots;
  if (m_count < 1) throw ConfigError("number of snapshots must be >= 1");
  if (!(options.t_start < options.t_end)) {
    throw ConfigError("time window must satisfy t_start < t_end");
  }
  const double span = (options.t_end - options.t_start) / m_count;

  // Bucket -1 holds folded history.
  std::vector<int> bucket(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    const EdgeEvent& ev = events[e];
    if (ev.src < 0 || ev.dst < 0 || ev.src >= num_users ||
        ev.dst >= num_users) {
      throw DataError("event " + std::to_string(e) + " edge " +
                      pair_name(ev.src, ev.dst) + " out of range");
    }
    if (!(ev.weight >= 0.0) || !std::isfinite(ev.weight)) {
      throw DataError("event " + std::to_string(e) + " has invalid weight");
    }
    if (!std::isfinite(ev.timestamp) || ev.timestamp > options.t_end) {
      throw DataError("event " + std::to_string(e) +
                      " timestamp outside the time window");
    }
    if (ev.timestamp < options.t_start) {
      if (!options.fold_history) {
        throw DataError("event " + std::to_string(e) +
                        " timestamp outside the time window");
      }
      bucket[e] = -1;
      continue;
    }
    const int b = static_cast<int>(std::floor((ev.timestamp - options.t_start) / span));
    bucket[e] = std::clamp(b, 0, m_count - 1);
  }

  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (bucket[a] != bucket[b]) return bucket[a] < bucket[b];
    return events[a].timestamp < events[b].timestamp;
  });

  struct LiveEdge {
    double weight;
    int added_in;
  };
  std::map<std::pair<int, int>, LiveEdge> live;
  std::size_t ignored = 0;
  auto apply = [&](int i, int j, const EdgeEvent& ev, int b) {
    const auto key = std::make_pair(i, j);
    if (ev.op == EdgeOp::kAdd) {
      live[key] = LiveEdge{ev.weight, b};
      return true;
    }
    return live.erase(key) > 0;
  };

  std::vector<SnapshotGraph> snapshots;
  snapshots.reserve(m_count);
  std::size_t next = 0;
  for (int b = -1; b < m_count; ++b) {
    while (next < order.size() && bucket[order[next]] == b) {
      const EdgeEvent& ev = events[order[next]];
      bool hit = apply(ev.src, ev.dst, ev, b);
      if (!options.directed && ev.src != ev.dst) {
        hit = apply(ev.dst, ev.src, ev, b) || hit;
      }
      if (!hit) ++ignored;
      ++next;
    }
    if (b < 0) continue;
    std::map<std::pair<int, int>, double> state;
    for (const auto& [key, edge] : live) {
      if (options.cumulative || edge.added_in == b) state[key] = edge.weight;
    }
    snapshots.emplace_back(from_edge_map(num_users, state));
  }
  return IngestResult{DynamicGraph(num_users, std::move(snapshots)), ignored};
}

SparseMatrix aggregate_with_decay(const DynamicGraph& graph) {
  const int m_count = graph.num_snapshots();
  SparseMatrix total(graph.num_users(), graph.num_users());
  for (int m = 0; m < m_count; ++m) {
    // 0-based m, so the exponent is (m + 1) - M.
    const double decay = std::exp(static_cast<double>(m + 1 - m_count));
    total += decay * graph.snapshot(m).adjacency();
  }
  total.makeCompressed();
  return total;
}

SparseMatrix laplacian(const SparseMatrix& adjacency) {
  const SparseMatrix transposed = adjacency.transpose();
  SparseMatrix sym = 0.5 * (adjacency + transposed);
  const Eigen::VectorXd degree = sym * Eigen::VectorXd::Ones(sym.cols());
  SparseMatrix diag(sym.rows(), sym.cols());
  std::vector<Triplet> d;
  d.reserve(sym.rows());
  for (int i = 0; i < sym.rows(); ++i) d.emplace_back(i, i, degree(i));
  diag.setFromTriplets(d.begin(), d.end());
  SparseMatrix out = diag - sym;
  out.prune(0.0);
  out.makeCompressed();
  return out;
}

IndicationPair::IndicationPair(const AnchorSet& anchors, int source_width,
                               int target_width)
    : rows_(anchors), source_width_(source_width), target_width_(target_width) {
  std::vector<char> used_s(std::max(source_width, 0), 0);
  std::vector<char> used_t(std::max(target_width, 0), 0);
  for (const AnchorPair& a : anchors) {
    const std::string name = "anchor " + pair_name(a.source, a.target);
    if (a.source < 0 || a.source >= source_width || a.target < 0 ||
        a.target >= target_width) {
      throw DataError(name + " out of range");
    }
    if (used_s[a.source]++ || used_t[a.target]++) {
      throw DataError(name + " repeats a user already anchored");
    }
  }
}

Eigen::MatrixXd IndicationPair::gather_source(const Eigen::MatrixXd& x) const {
  if (x.rows() != source_width_) throw DataError("gather width mismatch");
  Eigen::MatrixXd out(size(), x.cols());
  for (int a = 0; a < size(); ++a) out.row(a) = x.row(rows_[a].source);
  return out;
}

Eigen::MatrixXd IndicationPair::gather_target(const Eigen::MatrixXd& x) const {
  if (x.rows() != target_width_) throw DataError("gather width mismatch");
  Eigen::MatrixXd out(size(), x.cols());
  for (int a = 0; a < size(); ++a) out.row(a) = x.row(rows_[a].target);
  return out;
}

IndicationPair IndicationPair::reversed() const {
  AnchorSet flipped;
  flipped.reserve(rows_.size());
  for (const AnchorPair& a : rows_) flipped.push_back({a.target, a.source});
  return IndicationPair(flipped, target_width_, source_width_);
}

IndicationPair build_indication(const AnchorSet& anchors, int source_width,
                                int target_width) {
  return IndicationPair(anchors, source_width, target_width);
}

}  // namespace dynalign
