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

#include "dynalign/rwr.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dynalign/errors.h"
#include "dynalign/hashing.h"

namespace dynalign {
namespace {

// Row-stochastic walk over a fixed graph with dangling restart.
class Walker {
 public:
  explicit Walker(const SparseMatrix& graph) : graph_(graph) {
    if (graph.rows() != graph.cols()) throw DataError("graph must be square");
    degree_ = graph * Eigen::VectorXd::Ones(graph.cols());
  }

  Eigen::VectorXd scores(int start, const RwrConfig& cfg) const {
    const Eigen::Index n = graph_.rows();
    if (start < 0 || start >= n) throw DataError("start node out of range");
    Eigen::VectorXd current = Eigen::VectorXd::Zero(n);
    current(start) = 1.0;
    Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
    if (cfg.include_step_zero) total(start) += 1.0;
    Eigen::VectorXd next(n);
    for (int step = 1; step <= cfg.omega; ++step) {
      next.setZero();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mass = current(i);
        if (mass == 0.0) continue;
        if (degree_(i) <= 0.0) {
          next(start) += mass;
          continue;
        }
        const double share = mass / degree_(i);
        for (SparseMatrix::InnerIterator it(graph_, i); it; ++it) {
          next(it.col()) += share * it.value();
        }
      }
      current = cfg.xi * next;
      current(start) += 1.0 - cfg.xi;
      total += current;
    }
    return total;
  }

 private:
  const SparseMatrix& graph_;
  Eigen::VectorXd degree_;
};

}  // namespace

void RwrConfig::validate() const {
  if (!(xi >= 0.0 && xi < 1.0)) throw ConfigError("xi must lie in [0, 1)");
  if (omega < 1) throw ConfigError("omega must be >= 1");
}

Eigen::VectorXd rwr_scores(const SparseMatrix& graph, int start,
                           const RwrConfig& cfg) {
  cfg.validate();
  return Walker(graph).scores(start, cfg);
}

std::vector<int> select_ego(const Eigen::VectorXd& scores, int start,
                            int width) {
  if (width < 1) throw ConfigError("ego width must be >= 1");
  std::vector<int> candidates;
  for (int j = 0; j < scores.size(); ++j) {
    if (j != start && scores(j) > 0.0) candidates.push_back(j);
  }
  const std::size_t keep = std::min<std::size_t>(candidates.size(), width);
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), [&](int a, int b) {
                      if (scores(a) != scores(b)) return scores(a) > scores(b);
                      return a < b;
                    });
  candidates.resize(keep);
  candidates.resize(width, kPad);
  return candidates;
}

EgoTensor build_ego_tensor(const DynamicGraph& graph, const RwrConfig& cfg,
                           int width) {
  cfg.validate();
  if (width < 1) throw ConfigError("ego width must be >= 1");
  const int n = graph.num_users();
  EgoTensor ego;
  ego.num_users = n;
  ego.width = width;
  ego.ego_indices.resize(n);

  const SparseMatrix aggregated = aggregate_with_decay(graph);
  const Walker aggregated_walk(aggregated);
  for (int i = 0; i < n; ++i) {
    ego.ego_indices[i] = select_ego(aggregated_walk.scores(i, cfg), i, width);
  }

  for (const SnapshotGraph& snap : graph.snapshots()) {
    const Walker walk(snap.adjacency());
    Eigen::MatrixXd slice = Eigen::MatrixXd::Zero(n, width);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd r = walk.scores(i, cfg);
      for (int w = 0; w < width; ++w) {
        const int q = ego.ego_indices[i][w];
        if (q != kPad) slice(i, w) = r(q);
      }
    }
    ego.slices.push_back(std::move(slice));
  }
  return ego;
}

SparseMatrix rwr_proximity_matrix(const SparseMatrix& graph,
                                  const RwrConfig& cfg) {
  cfg.validate();
  const Walker walk(graph);
  std::vector<Triplet> triplets;
  for (int i = 0; i < graph.rows(); ++i) {
    const Eigen::VectorXd r = walk.scores(i, cfg);
    for (int j = 0; j < r.size(); ++j) {
      if (j != i && r(j) != 0.0) triplets.emplace_back(i, j, r(j));
    }
  }
  SparseMatrix out(graph.rows(), graph.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::uint64_t hash_graph(const DynamicGraph& graph) {
  Fnv1a h;
  h.update(static_cast<std::int64_t>(graph.num_users()));
  h.update(static_cast<std::int64_t>(graph.num_snapshots()));
  for (const SnapshotGraph& snap : graph.snapshots()) {
    const SparseMatrix& a = snap.adjacency();
    h.update(static_cast<std::int64_t>(a.nonZeros()));
    for (int k = 0; k < a.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
        h.update(static_cast<std::int64_t>(it.row()));
        h.update(static_cast<std::int64_t>(it.col()));
        h.update(it.value());
      }
    }
  }
  return h.digest();
}

void write_ego_cache(std::ostream& out, const EgoCacheKey& key,
                     const EgoTensor& ego) {
  out.precision(17);
  out << "dynalign-ego 1 " << to_hex(key.graph_hash) << ' ' << key.xi << ' '
      << key.omega << ' ' << key.width << '\n';
  out << ego.num_users << ' ' << ego.num_snapshots() << ' ' << ego.width
      << '\n';
  for (const auto& row : ego.ego_indices) {
    for (std::size_t w = 0; w < row.size(); ++w) {
      out << (w ? " " : "") << row[w];
    }
    out << '\n';
  }
  for (const Eigen::MatrixXd& slice : ego.slices) {
    for (Eigen::Index i = 0; i < slice.rows(); ++i) {
      for (Eigen::Index w = 0; w < slice.cols(); ++w) {
        out << (w ? " " : "") << slice(i, w);
      }
      out << '\n';
    }
  }
}

bool read_ego_cache(std::istream& in, const EgoCacheKey& key, EgoTensor& ego) {
  std::string magic, hash;
  int version = 0;
  EgoCacheKey stored;
  if (!(in >> magic >> version >> hash >> stored.xi >> stored.omega >>
        stored.width) ||
      magic != "dynalign-ego" || version != 1) {
    throw DataError("malformed ego cache header");
  }
  stored.graph_hash = std::stoull(hash, nullptr, 16);
  if (!(stored == key)) return false;

  int n = 0, m = 0, w = 0;
  if (!(in >> n >> m >> w) || n < 0 || m < 1 || w < 1) {
    throw DataError("malformed ego cache shape");
  }
  EgoTensor out;
  out.num_users = n;
  out.width = w;
  out.ego_indices.assign(n, std::vector<int>(w));
  for (auto& row : out.ego_indices) {
    for (int& q : row) {
      if (!(in >> q)) throw DataError("truncated ego cache");
    }
  }
  for (int s = 0; s < m; ++s) {
    Eigen::MatrixXd slice(n, w);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < w; ++c) {
        if (!(in >> slice(i, c))) throw DataError("truncated ego cache");
      }
    }
    out.slices.push_back(std::move(slice));
  }
  ego = std::move(out);
  return true;
}

}  // namespace dynalign
