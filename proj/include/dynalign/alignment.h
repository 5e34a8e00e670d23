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

#ifndef DYNALIGN_ALIGNMENT_H_
#define DYNALIGN_ALIGNMENT_H_

// Candidate ranking in the identity subspace and the Precision@K / MAP@K
// metrics.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dynalign {

enum class DistanceKind { kEuclidean, kCosine };

struct CandidateList {
  int source_user = 0;
  std::vector<int> ranked_targets;  // length K
  std::vector<double> distances;    // non-decreasing
};

struct RankOptions {
  DistanceKind distance = DistanceKind::kEuclidean;
  // Target users removed from every candidate pool (e.g. training anchors).
  std::vector<int> excluded_targets;
};

// For each source row, the K nearest target rows; ties by ascending target
// index. Throws DataError if K < 1 or K exceeds the candidate pool.
std::vector<CandidateList> rank_candidates(const Eigen::MatrixXd& v_s,
                                           const Eigen::MatrixXd& v_t,
                                           const std::vector<int>& sources,
                                           int k,
                                           const RankOptions& options = {});

using GroundTruth = std::map<int, int>;  // source -> target

// Mean of 1{truth in top K}. Throws DataError for a list shorter than K or a
// source without a truth entry.
double precision_at_k(const std::vector<CandidateList>& lists,
                      const GroundTruth& truth, int k);

// Mean of 1/rank of the truth within the top K, 0 when absent.
double map_at_k(const std::vector<CandidateList>& lists,
                const GroundTruth& truth, int k);

// 2A / (S + T). Throws DataError unless S, T > 0 and A <= min(S, T).
double overlap_rate(long anchors, long source_users, long target_users);

struct EvalEntry {
  int k = 0;
  int n_test_anchors = 0;
  double precision_at_k = 0.0;
  double map_at_k = 0.0;
};

struct EvalModes {
  DistanceKind distance = DistanceKind::kEuclidean;
  bool exclude_train_targets = false;
  bool symmetric = false;  // average source->target and target->source
  bool static_ablation = false;
};

// Ranks once with the largest K and scores every K from the same lists.
std::vector<EvalEntry> evaluate(const Eigen::MatrixXd& v_s,
                                const Eigen::MatrixXd& v_t,
                                const GroundTruth& test_truth,
                                const GroundTruth& train_truth,
                                const std::vector<int>& ks,
                                const EvalModes& modes);

// CSV: source_id,rank,target_id,distance (rank is 1-based). Indices are
// written through the name tables when given.
void write_candidates_csv(std::ostream& out,
                          const std::vector<CandidateList>& lists,
                          const std::string& config_hash,
                          const std::vector<std::string>* source_names = nullptr,
                          const std::vector<std::string>* target_names = nullptr);

std::string distance_name(DistanceKind kind);

}  // namespace dynalign

#endif  // DYNALIGN_ALIGNMENT_H_
