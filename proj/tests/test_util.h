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

#ifndef DYNALIGN_TESTS_TEST_UTIL_H_
#define DYNALIGN_TESTS_TEST_UTIL_H_

#include <random>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynalign/graph.h"

namespace dynalign::testing {

inline SparseMatrix random_adjacency(int n, double density, bool directed,
                                     std::mt19937_64& rng) {
  std::bernoulli_distribution edge(density);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j || !edge(rng)) continue;
      const double w = weight(rng);
      t.emplace_back(i, j, w);
      if (!directed) t.emplace_back(j, i, w);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

inline DynamicGraph random_dynamic_graph(int n, int m, double density,
                                         std::mt19937_64& rng) {
  std::vector<SnapshotGraph> snaps;
  for (int k = 0; k < m; ++k) {
    snaps.emplace_back(random_adjacency(n, density, false, rng));
  }
  return DynamicGraph(n, std::move(snaps));
}

inline std::set<std::pair<int, int>> edge_set(const SparseMatrix& a) {
  std::set<std::pair<int, int>> out;
  for (int i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      if (it.value() != 0.0) out.emplace(i, static_cast<int>(it.col()));
    }
  }
  return out;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

// Dense ω-step walk: Σ_{k=1..ω} r^(k) with explicit matrix powers of the
// row-normalized transition, dangling rows replaced by the start row.
inline Eigen::VectorXd dense_rwr_oracle(const Eigen::MatrixXd& g, int start,
                                        double xi, int omega) {
  const int n = static_cast<int>(g.rows());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double d = g.row(i).sum();
    if (d > 0.0) {
      p.row(i) = g.row(i) / d;
    } else {
      p(i, start) = 1.0;
    }
  }
  Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
  e(start) = 1.0;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (int k = 1; k <= omega; ++k) {
    Eigen::MatrixXd pk = Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < k; ++j) pk = pk * p;
    Eigen::RowVectorXd term = std::pow(xi, k) * e * pk;
    for (int j = 0; j < k; ++j) {
      Eigen::MatrixXd pj = Eigen::MatrixXd::Identity(n, n);
      for (int q = 0; q < j; ++q) pj = pj * p;
      term += (1.0 - xi) * std::pow(xi, j) * e * pj;
    }
    r += term.transpose();
  }
  return r;
}

}  // namespace dynalign::testing

#endif  // DYNALIGN_TESTS_TEST_UTIL_H_
