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

#include "dynalign/synthetic.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "dynalign/errors.h"

namespace dynalign {
namespace {

using Pair = std::pair<int, int>;

Pair ordered(int a, int b) { return a < b ? Pair{a, b} : Pair{b, a}; }

// Index drawn with probability proportional to weights[k].
int weighted_pick(const std::vector<double>& weights, std::mt19937_64& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::uniform_real_distribution<double> u(0.0, total);
  double target = u(rng);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    target -= weights[k];
    if (target < 0.0) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::set<Pair> edge_set(const SparseMatrix& a, const std::vector<int>& local) {
  std::set<Pair> out;
  for (int i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      const int j = static_cast<int>(it.col());
      if (i < j && local[i] >= 0 && local[j] >= 0) {
        out.insert(ordered(local[i], local[j]));
      }
    }
  }
  return out;
}

struct View {
  std::vector<int> base_of;  // local -> base
  std::vector<int> local;    // base -> local or -1
};

View make_view(const std::vector<int>& members, int n_base,
               std::mt19937_64& rng) {
  View v;
  v.base_of = members;
  std::shuffle(v.base_of.begin(), v.base_of.end(), rng);
  v.local.assign(n_base, -1);
  for (std::size_t k = 0; k < v.base_of.size(); ++k) {
    v.local[v.base_of[k]] = static_cast<int>(k);
  }
  return v;
}

std::vector<EdgeEvent> noisy_view_events(
    const SyntheticBase& base, const View& view, double noise,
    const std::map<Pair, std::vector<std::pair<double, EdgeOp>>>& history,
    std::mt19937_64& rng) {
  const int n = static_cast<int>(view.base_of.size());
  const int m_count = base.graph.num_snapshots();
  std::bernoulli_distribution flip(noise);
  std::uniform_int_distribution<int> pick(0, std::max(n - 1, 0));

  // Timestamp of a matching base event inside the interval, or its midpoint.
  auto stamp = [&](const Pair& local_pair, int m, EdgeOp op) {
    const Pair key = ordered(view.base_of[local_pair.first],
                             view.base_of[local_pair.second]);
    auto it = history.find(key);
    if (it != history.end()) {
      for (const auto& [t, o] : it->second) {
        if (o == op && t >= m && t < m + 1) return t;
      }
    }
    return m + 0.5;
  };

  std::vector<EdgeEvent> events;
  std::set<Pair> previous;
  for (int m = 0; m < m_count; ++m) {
    const std::set<Pair> clean =
        edge_set(base.graph.snapshot(m).adjacency(), view.local);
    std::set<Pair> noisy;
    std::vector<Pair> spurious;
    for (const Pair& e : clean) {
      if (!flip(rng)) noisy.insert(e);
      if (n >= 2 && flip(rng)) {
        for (int attempt = 0; attempt < 20; ++attempt) {
          const int a = pick(rng);
          const int b = pick(rng);
          if (a != b && !clean.count(ordered(a, b))) {
            spurious.push_back(ordered(a, b));
            break;
          }
        }
      }
    }
    noisy.insert(spurious.begin(), spurious.end());

    for (const Pair& e : noisy) {
      if (!previous.count(e)) {
        events.push_back({e.first, e.second, stamp(e, m, EdgeOp::kAdd), 1.0,
                          EdgeOp::kAdd});
      }
    }
    for (const Pair& e : previous) {
      if (!noisy.count(e)) {
        events.push_back({e.first, e.second, stamp(e, m, EdgeOp::kRemove), 1.0,
                          EdgeOp::kRemove});
      }
    }
    previous = std::move(noisy);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const EdgeEvent& a, const EdgeEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  return events;
}

DynamicGraph ingest_view(const std::vector<EdgeEvent>& events, int n, int m) {
  IngestOptions opts;
  opts.num_snapshots = m;
  opts.t_start = 0.0;
  opts.t_end = m;
  opts.directed = false;
  return ingest_edge_events(events, n, opts).graph;
}

}  // namespace

void SynthConfig::validate() const {
  if (growth < 1) throw ConfigError("growth must be >= 1");
  if (n_base < growth + 1) throw ConfigError("n_base must be >= growth + 1");
  if (num_snapshots < 1) throw ConfigError("number of snapshots must be >= 1");
  if (!(churn_add >= 0.0 && churn_add <= 1.0 && churn_remove >= 0.0 &&
        churn_remove <= 1.0)) {
    throw ConfigError("churn probabilities must lie in [0, 1]");
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ConfigError("lambda must lie in (0, 1]");
  }
  if (!(edge_noise >= 0.0 && edge_noise < 1.0)) {
    throw ConfigError("edge_noise must lie in [0, 1)");
  }
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
}

SyntheticBase generate_base(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const int n = cfg.n_base;
  const int m_count = cfg.num_snapshots;

  std::vector<double> arrival(n);
  std::uniform_real_distribution<double> when(0.0, m_count);
  for (double& t : arrival) t = when(rng);
  std::sort(arrival.begin(), arrival.end());
  arrival[0] = 0.0;

  std::vector<std::set<int>> adj(n);
  std::vector<EdgeEvent> events;
  auto add_edge = [&](int a, int b, double t) {
    adj[a].insert(b);
    adj[b].insert(a);
    const Pair p = ordered(a, b);
    events.push_back({p.first, p.second, t, 1.0, EdgeOp::kAdd});
  };

  int arrived = 0;
  for (int m = 0; m < m_count; ++m) {
    const int present_at_start = arrived;
    std::vector<Pair> start_edges;
    for (int a = 0; a < present_at_start; ++a) {
      for (int b : adj[a]) {
        if (a < b) start_edges.emplace_back(a, b);
      }
    }

    while (arrived < n && arrival[arrived] < m + 1) {
      const int node = arrived++;
      const int links = std::min(cfg.growth, node);
      std::vector<double> weights(node);
      for (int k = 0; k < node; ++k) {
        weights[k] = static_cast<double>(adj[k].size()) + 1.0;
      }
      for (int l = 0; l < links; ++l) {
        const int target = weighted_pick(weights, rng);
        weights[target] = 0.0;
        add_edge(node, target, arrival[node]);
      }
    }

    if (present_at_start < 2) continue;
    std::uniform_real_distribution<double> inside(m, m + 1);
    std::set<Pair> touched;
    std::bernoulli_distribution drop(cfg.churn_remove);
    for (const Pair& e : start_edges) {
      if (!drop(rng)) continue;
      adj[e.first].erase(e.second);
      adj[e.second].erase(e.first);
      touched.insert(e);
      events.push_back({e.first, e.second, inside(rng), 1.0, EdgeOp::kRemove});
    }

    std::binomial_distribution<int> how_many(
        static_cast<int>(start_edges.size()), cfg.churn_add);
    const int additions = start_edges.empty() ? 0 : how_many(rng);
    std::uniform_int_distribution<int> anyone(0, present_at_start - 1);
    for (int k = 0; k < additions; ++k) {
      for (int attempt = 0; attempt < 20; ++attempt) {
        const int u = anyone(rng);
        int w = -1;
        if (!adj[u].empty()) {
          // Close a triangle u - v - w.
          auto it = adj[u].begin();
          std::advance(it, std::uniform_int_distribution<int>(
                               0, static_cast<int>(adj[u].size()) - 1)(rng));
          const int v = *it;
          auto jt = adj[v].begin();
          std::advance(jt, std::uniform_int_distribution<int>(
                               0, static_cast<int>(adj[v].size()) - 1)(rng));
          w = *jt;
        } else {
          w = anyone(rng);
        }
        if (w < 0 || w == u || w >= present_at_start || adj[u].count(w) ||
            touched.count(ordered(u, w))) {
          continue;
        }
        touched.insert(ordered(u, w));
        add_edge(u, w, inside(rng));
        break;
      }
    }
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const EdgeEvent& a, const EdgeEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  IngestOptions opts;
  opts.num_snapshots = m_count;
  opts.t_start = 0.0;
  opts.t_end = m_count;
  opts.directed = false;
  DynamicGraph graph = ingest_edge_events(events, n, opts).graph;
  return SyntheticBase{std::move(events), std::move(graph)};
}

ViewSizes view_sizes(int n_base, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ConfigError("lambda must lie in (0, 1]");
  }
  ViewSizes s;
  s.view_users = static_cast<int>(std::floor(n_base / (2.0 - lambda) + 1e-9));
  s.shared_users = static_cast<int>(std::lround(lambda * s.view_users));
  if (s.view_users < 2 || s.shared_users < 1 ||
      s.shared_users > s.view_users ||
      2 * s.view_users - s.shared_users > n_base) {
    throw ConfigError("lambda infeasible for n_base = " +
                      std::to_string(n_base));
  }
  return s;
}

PlantedInstance split_views(const SyntheticBase& base, const SynthConfig& cfg) {
  cfg.validate();
  const int n_base = base.graph.num_users();
  const ViewSizes sizes = view_sizes(n_base, cfg.lambda);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<int> perm(n_base);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const int a = sizes.shared_users;
  const int s = sizes.view_users;
  std::vector<int> members_s(perm.begin(), perm.begin() + s);
  std::vector<int> members_t(perm.begin(), perm.begin() + a);
  members_t.insert(members_t.end(), perm.begin() + s,
                   perm.begin() + (2 * s - a));

  const View view_s = make_view(members_s, n_base, rng);
  const View view_t = make_view(members_t, n_base, rng);

  std::map<Pair, std::vector<std::pair<double, EdgeOp>>> history;
  for (const EdgeEvent& e : base.events) {
    history[ordered(e.src, e.dst)].emplace_back(e.timestamp, e.op);
  }

  std::vector<EdgeEvent> events_s =
      noisy_view_events(base, view_s, cfg.edge_noise, history, rng);
  std::vector<EdgeEvent> events_t =
      noisy_view_events(base, view_t, cfg.edge_noise, history, rng);
  const int m_count = base.graph.num_snapshots();
  DynamicGraph g_s = ingest_view(events_s, s, m_count);
  DynamicGraph g_t = ingest_view(events_t, s, m_count);
  PlantedInstance out{s,
                      s,
                      std::move(events_s),
                      std::move(events_t),
                      std::move(g_s),
                      std::move(g_t),
                      {},
                      {},
                      {},
                      view_s.base_of,
                      view_t.base_of};

  for (int k = 0; k < a; ++k) {
    const int b = perm[k];
    out.truth.push_back({view_s.local[b], view_t.local[b]});
  }
  std::sort(out.truth.begin(), out.truth.end(),
            [](const AnchorPair& x, const AnchorPair& y) {
              return x.source < y.source;
            });

  AnchorSet shuffled = out.truth;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto n_train =
      static_cast<std::size_t>(std::lround(cfg.eta * shuffled.size()));
  out.train_anchors.assign(shuffled.begin(), shuffled.begin() + n_train);
  out.test_anchors.assign(shuffled.begin() + n_train, shuffled.end());
  auto by_source = [](const AnchorPair& x, const AnchorPair& y) {
    return x.source < y.source;
  };
  std::sort(out.train_anchors.begin(), out.train_anchors.end(), by_source);
  std::sort(out.test_anchors.begin(), out.test_anchors.end(), by_source);
  return out;
}

}  // namespace dynalign
