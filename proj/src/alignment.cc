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

#include "dynalign/alignment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "dynalign/errors.h"

namespace dynalign {
namespace {

double distance(const Eigen::MatrixXd& a, Eigen::Index i,
                const Eigen::MatrixXd& b, Eigen::Index j, DistanceKind kind) {
  if (kind == DistanceKind::kEuclidean) return (a.row(i) - b.row(j)).norm();
  const double na = a.row(i).norm();
  const double nb = b.row(j).norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - a.row(i).dot(b.row(j)) / (na * nb);
}

// 1-based rank of `target` within the first k entries, 0 if absent.
int hit_rank(const CandidateList& list, int target, int k) {
  if (static_cast<int>(list.ranked_targets.size()) < k) {
    throw DataError("candidate list for source " +
                    std::to_string(list.source_user) + " shorter than K");
  }
  for (int r = 0; r < k; ++r) {
    if (list.ranked_targets[r] == target) return r + 1;
  }
  return 0;
}

int truth_of(const GroundTruth& truth, int source) {
  auto it = truth.find(source);
  if (it == truth.end()) {
    throw DataError("no ground truth for source " + std::to_string(source));
  }
  return it->second;
}

GroundTruth invert(const GroundTruth& truth) {
  GroundTruth out;
  for (const auto& [s, t] : truth) out.emplace(t, s);
  return out;
}

std::vector<int> keys(const GroundTruth& truth) {
  std::vector<int> out;
  for (const auto& kv : truth) out.push_back(kv.first);
  return out;
}

std::vector<int> values(const GroundTruth& truth) {
  std::vector<int> out;
  for (const auto& kv : truth) out.push_back(kv.second);
  return out;
}

}  // namespace

std::vector<CandidateList> rank_candidates(const Eigen::MatrixXd& v_s,
                                           const Eigen::MatrixXd& v_t,
                                           const std::vector<int>& sources,
                                           int k, const RankOptions& options) {
  if (v_s.cols() != v_t.cols()) throw DataError("embedding widths differ");
  std::vector<char> excluded(v_t.rows(), 0);
  for (int t : options.excluded_targets) {
    if (t >= 0 && t < v_t.rows()) excluded[t] = 1;
  }
  std::vector<int> pool;
  for (int t = 0; t < v_t.rows(); ++t) {
    if (!excluded[t]) pool.push_back(t);
  }
  if (k < 1 || k > static_cast<int>(pool.size())) {
    throw DataError("K = " + std::to_string(k) +
                    " outside [1, candidate pool size " +
                    std::to_string(pool.size()) + "]");
  }

  std::vector<CandidateList> out;
  out.reserve(sources.size());
  std::vector<std::pair<double, int>> scored(pool.size());
  for (int s : sources) {
    if (s < 0 || s >= v_s.rows()) {
      throw DataError("source " + std::to_string(s) + " out of range");
    }
    for (std::size_t c = 0; c < pool.size(); ++c) {
      scored[c] = {distance(v_s, s, v_t, pool[c], options.distance), pool[c]};
    }
    std::partial_sort(scored.begin(), scored.begin() + k, scored.end());
    CandidateList list;
    list.source_user = s;
    for (int r = 0; r < k; ++r) {
      list.distances.push_back(scored[r].first);
      list.ranked_targets.push_back(scored[r].second);
    }
    out.push_back(std::move(list));
  }
  return out;
}

double precision_at_k(const std::vector<CandidateList>& lists,
                      const GroundTruth& truth, int k) {
  if (lists.empty()) return 0.0;
  double hits = 0.0;
  for (const CandidateList& l : lists) {
    if (hit_rank(l, truth_of(truth, l.source_user), k) > 0) hits += 1.0;
  }
  return hits / static_cast<double>(lists.size());
}

double map_at_k(const std::vector<CandidateList>& lists,
                const GroundTruth& truth, int k) {
  if (lists.empty()) return 0.0;
  double total = 0.0;
  for (const CandidateList& l : lists) {
    const int rank = hit_rank(l, truth_of(truth, l.source_user), k);
    if (rank > 0) total += 1.0 / rank;
  }
  return total / static_cast<double>(lists.size());
}

double overlap_rate(long anchors, long source_users, long target_users) {
  if (source_users <= 0 || target_users <= 0 || anchors < 0 ||
      anchors > std::min(source_users, target_users)) {
    throw DataError("overlap rate needs S, T > 0 and 0 <= A <= min(S, T)");
  }
  return 2.0 * static_cast<double>(anchors) /
         static_cast<double>(source_users + target_users);
}

std::vector<EvalEntry> evaluate(const Eigen::MatrixXd& v_s,
                                const Eigen::MatrixXd& v_t,
                                const GroundTruth& test_truth,
                                const GroundTruth& train_truth,
                                const std::vector<int>& ks,
                                const EvalModes& modes) {
  if (ks.empty()) throw ConfigError("no K values to evaluate");
  const int k_max = *std::max_element(ks.begin(), ks.end());

  auto one_direction = [&](const Eigen::MatrixXd& from,
                           const Eigen::MatrixXd& to, const GroundTruth& test,
                           const GroundTruth& train) {
    RankOptions opts;
    opts.distance = modes.distance;
    if (modes.exclude_train_targets) opts.excluded_targets = values(train);
    const auto lists = rank_candidates(from, to, keys(test), k_max, opts);
    std::vector<EvalEntry> entries;
    for (int k : ks) {
      entries.push_back({k, static_cast<int>(test.size()),
                         precision_at_k(lists, test, k),
                         map_at_k(lists, test, k)});
    }
    return entries;
  };

  std::vector<EvalEntry> out =
      one_direction(v_s, v_t, test_truth, train_truth);
  if (modes.symmetric) {
    const auto back =
        one_direction(v_t, v_s, invert(test_truth), invert(train_truth));
    for (std::size_t e = 0; e < out.size(); ++e) {
      out[e].precision_at_k = 0.5 * (out[e].precision_at_k + back[e].precision_at_k);
      out[e].map_at_k = 0.5 * (out[e].map_at_k + back[e].map_at_k);
    }
  }
  return out;
}

void write_candidates_csv(std::ostream& out,
                          const std::vector<CandidateList>& lists,
                          const std::string& config_hash,
                          const std::vector<std::string>* source_names,
                          const std::vector<std::string>* target_names) {
  auto name = [](const std::vector<std::string>* names, int i) {
    return names != nullptr ? names->at(i) : std::to_string(i);
  };
  out.precision(17);
  out << "# config_hash=" << config_hash << '\n';
  out << "source_id,rank,target_id,distance\n";
  for (const CandidateList& l : lists) {
    for (std::size_t r = 0; r < l.ranked_targets.size(); ++r) {
      out << name(source_names, l.source_user) << ',' << r + 1 << ','
          << name(target_names, l.ranked_targets[r]) << ',' << l.distances[r]
          << '\n';
    }
  }
}

std::string distance_name(DistanceKind kind) {
  return kind == DistanceKind::kEuclidean ? "euclidean" : "cosine";
}

}  // namespace dynalign
