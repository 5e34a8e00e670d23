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

#include "dynalign/config.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "dynalign/errors.h"
#include "dynalign/hashing.h"

namespace dynalign {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long out = std::stoll(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename Parse>
std::vector<T> to_list(const std::string& key, const std::string& v,
                       Parse parse) {
  std::vector<T> out;
  for (const std::string& item : split_list(v)) {
    out.push_back(static_cast<T>(parse(key, item)));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(xs[k]);
    } else {
      out += std::to_string(xs[k]);
    }
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define DYNALIGN_REAL(name)                                            \
  {#name,                                                              \
   {[](RunConfig& c, const std::string& k, const std::string& v) {     \
      c.name = to_double(k, v);                                        \
    },                                                                 \
    [](const RunConfig& c) { return fmt(c.name); }}}
#define DYNALIGN_INT(name)                                             \
  {#name,                                                              \
   {[](RunConfig& c, const std::string& k, const std::string& v) {     \
      c.name = static_cast<decltype(c.name)>(to_int(k, v));            \
    },                                                                 \
    [](const RunConfig& c) { return std::to_string(c.name); }}}
#define DYNALIGN_BOOL(name)                                            \
  {#name,                                                              \
   {[](RunConfig& c, const std::string& k, const std::string& v) {     \
      c.name = to_bool(k, v);                                          \
    },                                                                 \
    [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }}}
#define DYNALIGN_REAL_LIST(name)                                       \
  {#name,                                                              \
   {[](RunConfig& c, const std::string& k, const std::string& v) {     \
      c.name = to_list<double>(k, v, to_double);                       \
    },                                                                 \
    [](const RunConfig& c) { return join(c.name); }}}
#define DYNALIGN_INT_LIST(name)                                        \
  {#name,                                                              \
   {[](RunConfig& c, const std::string& k, const std::string& v) {     \
      c.name = to_list<int>(k, v, to_int);                             \
    },                                                                 \
    [](const RunConfig& c) { return join(c.name); }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      DYNALIGN_INT_LIST(num_snapshots),
      DYNALIGN_REAL_LIST(snapshot_interval),
      DYNALIGN_BOOL(directed),
      DYNALIGN_BOOL(cumulative),
      {"time_window",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "auto") {
            c.has_time_window = false;
            return;
          }
          const auto parts = to_list<double>(k, v, to_double);
          if (parts.size() != 2) {
            throw ConfigError(k + ": expected 'auto' or 't_start,t_end'");
          }
          c.has_time_window = true;
          c.time_start = parts[0];
          c.time_end = parts[1];
        },
        [](const RunConfig& c) {
          return c.has_time_window ? fmt(c.time_start) + "," + fmt(c.time_end)
                                   : std::string("auto");
        }}},
      DYNALIGN_REAL(xi),
      DYNALIGN_INT(omega),
      DYNALIGN_INT(ego_width),
      DYNALIGN_BOOL(rwr_include_step_zero),
      DYNALIGN_INT(dual_dim),
      DYNALIGN_INT(identity_dim),
      DYNALIGN_REAL(alpha),
      DYNALIGN_REAL(beta),
      DYNALIGN_REAL(gamma),
      DYNALIGN_REAL(learning_rate),
      DYNALIGN_REAL(keep_prob),
      DYNALIGN_REAL(l2),
      DYNALIGN_INT(epochs_per_round),
      DYNALIGN_INT(pretrain_epochs),
      DYNALIGN_INT(batch_size),
      DYNALIGN_INT(max_rounds),
      DYNALIGN_REAL(tol),
      DYNALIGN_REAL(eps_div),
      DYNALIGN_REAL(ridge),
      {"consistency",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "laplacian") {
            c.consistency = ConsistencyKind::kLaplacian;
          } else if (v == "rwr") {
            c.consistency = ConsistencyKind::kRwr;
          } else {
            throw ConfigError(k + ": expected laplacian or rwr");
          }
        },
        [](const RunConfig& c) {
          return std::string(c.consistency == ConsistencyKind::kLaplacian
                                 ? "laplacian"
                                 : "rwr");
        }}},
      DYNALIGN_BOOL(shared_init),
      DYNALIGN_INT_LIST(ks),
      {"distance",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "euclidean") {
            c.distance = DistanceKind::kEuclidean;
          } else if (v == "cosine") {
            c.distance = DistanceKind::kCosine;
          } else {
            throw ConfigError(k + ": expected euclidean or cosine");
          }
        },
        [](const RunConfig& c) { return distance_name(c.distance); }}},
      DYNALIGN_BOOL(exclude_train_targets),
      DYNALIGN_BOOL(symmetric),
      DYNALIGN_INT(n_base),
      DYNALIGN_INT(synth_periods),
      DYNALIGN_INT(growth),
      DYNALIGN_REAL(churn_add),
      DYNALIGN_REAL(churn_remove),
      DYNALIGN_REAL_LIST(lambda),
      DYNALIGN_REAL(edge_noise),
      DYNALIGN_REAL_LIST(eta),
      DYNALIGN_INT(seed),
      DYNALIGN_INT(repeats),
  };
  return table;
}

#undef DYNALIGN_REAL
#undef DYNALIGN_INT
#undef DYNALIGN_BOOL
#undef DYNALIGN_REAL_LIST
#undef DYNALIGN_INT_LIST

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line) +
                        ": expected key = value");
    }
    try {
      set_config_value(cfg, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line) + ": " + e.what());
    }
  }
  return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
  for (const auto& [key, field] : fields()) {
    std::string env = "DYNALIGN_" + key;
    std::transform(env.begin(), env.end(), env.begin(),
                   [](unsigned char ch) { return std::toupper(ch); });
    if (const char* value = std::getenv(env.c_str())) {
      field.set(cfg, key, trim(value));
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  RunConfig cfg = parse_config(in);
  apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  for (int m : num_snapshots) {
    if (m < 1) throw ConfigError("num_snapshots must be >= 1");
  }
  for (double s : snapshot_interval) {
    if (!(s >= 0.0)) throw ConfigError("snapshot_interval must be >= 0");
  }
  if (has_time_window && !(time_start < time_end)) {
    throw ConfigError("time_window must satisfy t_start < t_end");
  }
  if (ego_width < 1 || dual_dim < 1 || identity_dim < 1) {
    throw ConfigError("ego_width, dual_dim and identity_dim must be >= 1");
  }
  if (max_rounds < 0) throw ConfigError("max_rounds must be >= 0");
  if (!(tol >= 0.0)) throw ConfigError("tol must be >= 0");
  for (int k : ks) {
    if (k < 1) throw ConfigError("every K must be >= 1");
  }
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  rwr().validate();
  train().validate();
  weights().validate();
  for (double l : lambda) {
    SynthConfig s = synth();
    s.lambda = l;
    s.validate();
  }
  for (double e : eta) {
    SynthConfig s = synth();
    s.eta = e;
    s.validate();
  }
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [key, field] : fields()) {
    out += key + " = " + field.get(*this) + "\n";
  }
  return out;
}

std::string RunConfig::hash() const {
  Fnv1a h;
  h.update(canonical());
  return to_hex(h.digest());
}

bool RunConfig::is_sweep() const {
  return num_snapshots.size() > 1 || snapshot_interval.size() > 1 ||
         lambda.size() > 1 || eta.size() > 1;
}

RwrConfig RunConfig::rwr() const {
  return RwrConfig{xi, omega, rwr_include_step_zero};
}

TrainConfig RunConfig::train(std::uint64_t seed_offset) const {
  TrainConfig t;
  t.alpha = alpha;
  t.beta = beta;
  t.keep_prob = keep_prob;
  t.l2 = l2;
  t.learning_rate = learning_rate;
  t.epochs_per_round = epochs_per_round;
  t.pretrain_epochs = pretrain_epochs;
  t.batch_size = batch_size;
  t.seed = seed + seed_offset;
  return t;
}

ObjWeights RunConfig::weights() const {
  return ObjWeights{alpha, beta, gamma, eps_div, ridge};
}

Schedule RunConfig::schedule() const {
  Schedule s;
  s.max_rounds = max_rounds;
  s.tol = tol;
  return s;
}

SynthConfig RunConfig::synth() const {
  SynthConfig s;
  s.n_base = n_base;
  s.num_snapshots = synth_periods;
  s.growth = growth;
  s.churn_add = churn_add;
  s.churn_remove = churn_remove;
  s.lambda = lambda.front();
  s.edge_noise = edge_noise;
  s.eta = eta.front();
  s.seed = seed;
  return s;
}

EvalModes RunConfig::eval_modes(bool static_ablation) const {
  EvalModes m;
  m.distance = distance;
  m.exclude_train_targets = exclude_train_targets;
  m.symmetric = symmetric;
  m.static_ablation = static_ablation;
  return m;
}

}  // namespace dynalign
