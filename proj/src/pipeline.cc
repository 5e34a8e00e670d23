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

#include "dynalign/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

#include "dynalign/errors.h"
#include "dynalign/hashing.h"
#include "dynalign/lstm_autoencoder.h"
#include "dynalign/rwr.h"
#include "dynalign/synthetic.h"

namespace dynalign {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kDataFiles[] = {
    "source_ids.txt",    "target_ids.txt",   "source_events.txt",
    "target_events.txt", "anchors_train.txt", "anchors_test.txt",
};

// Re-throws `e` with the stage name prepended, keeping its category.
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
  try {
    throw;
  } catch (const DivergenceError& e) {
    throw DivergenceError(stage + ": " + e.what(), e.trace());
  } catch (const NumericalError& e) {
    throw NumericalError(e.term(), stage + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw DataError(stage + ": " + e.what());
  }
}

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (...) {
    rethrow_with_stage(name);
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create directory " + dir.string());
  }
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

GroundTruth to_truth(const AnchorSet& anchors) {
  GroundTruth t;
  for (const AnchorPair& a : anchors) t.emplace(a.source, a.target);
  return t;
}

Eigen::MatrixXd read_matrix_file(const fs::path& path) {
  auto in = open_in(path);
  return read_matrix_csv(in);
}

json entries_json(const std::vector<EvalEntry>& entries) {
  json out = json::array();
  for (const EvalEntry& e : entries) {
    out.push_back({{"k", e.k},
                   {"n_test_anchors", e.n_test_anchors},
                   {"precision_at_k", e.precision_at_k},
                   {"map_at_k", e.map_at_k}});
  }
  return out;
}

SparseMatrix consistency_laplacian(const RunConfig& cfg,
                                   const DynamicGraph& g) {
  const SparseMatrix aggregated = aggregate_with_decay(g);
  if (cfg.consistency == ConsistencyKind::kRwr) {
    return laplacian(rwr_proximity_matrix(aggregated, cfg.rwr()));
  }
  return laplacian(aggregated);
}

// Ego tensors are cached under <data_dir>/ego_cache keyed by graph and walk
// parameters.
EgoTensor cached_ego_tensor(const RunConfig& cfg, const DynamicGraph& g,
                            const fs::path& data_dir) {
  const RwrConfig rwr = cfg.rwr();
  const EgoCacheKey key{hash_graph(g), rwr.xi, rwr.omega, cfg.ego_width};
  Fnv1a h;
  h.update(static_cast<std::int64_t>(key.graph_hash));
  h.update(key.xi);
  h.update(static_cast<std::int64_t>(key.omega));
  h.update(static_cast<std::int64_t>(key.width));
  h.update(static_cast<std::int64_t>(rwr.include_step_zero));
  const fs::path path =
      data_dir / "ego_cache" / ("ego_" + to_hex(h.digest()) + ".txt");
  if (fs::exists(path)) {
    std::ifstream in(path);
    EgoTensor ego;
    if (in && read_ego_cache(in, key, ego)) return ego;
  }
  EgoTensor ego = build_ego_tensor(g, rwr, cfg.ego_width);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (!ec) {
    std::ofstream out(path);
    if (out) write_ego_cache(out, key, ego);
  }
  return ego;
}

double t_critical_95(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447,
                                 2.365,  2.306, 2.262, 2.228, 2.201, 2.179,
                                 2.160,  2.145, 2.131, 2.120, 2.110, 2.101,
                                 2.093,  2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return 0.0;
  if (dof <= 30) return table[dof - 1];
  return 1.96;
}

std::string format_label(double lambda, double eta, int m, double interval,
                         std::uint64_t seed) {
  std::ostringstream ss;
  ss << "lambda" << lambda << "_eta" << eta << "_M" << m << "_int" << interval
     << "_seed" << seed;
  return ss.str();
}

}  // namespace

std::string hash_data_dir(const std::string& data_dir) {
  Fnv1a h;
  for (const char* name : kDataFiles) {
    const fs::path path = fs::path(data_dir) / name;
    h.update(std::string_view(name));
    if (fs::exists(path)) {
      h.update(static_cast<std::int64_t>(hash_file(path.string())));
    }
  }
  return to_hex(h.digest());
}

LoadedData load_data(const RunConfig& cfg, const std::string& data_dir) {
  const fs::path dir(data_dir);
  LoadedData d;
  for (auto [file, ids] : {std::pair{"source_ids.txt", &d.source_ids},
                           std::pair{"target_ids.txt", &d.target_ids}}) {
    if (fs::exists(dir / file)) {
      auto in = open_in(dir / file);
      try {
        *ids = read_id_map(in);
      } catch (const ParseError& e) {
        throw DataError((dir / file).string() + ": " + e.what());
      }
    }
  }
  d.events_s = read_edge_events_file((dir / "source_events.txt").string(),
                                     d.source_ids);
  d.events_t = read_edge_events_file((dir / "target_events.txt").string(),
                                     d.target_ids);
  d.train = read_anchors_file((dir / "anchors_train.txt").string(),
                              d.source_ids, d.target_ids);
  if (fs::exists(dir / "anchors_test.txt")) {
    d.test = read_anchors_file((dir / "anchors_test.txt").string(),
                               d.source_ids, d.target_ids);
  }

  if (cfg.has_time_window) {
    d.t_start = cfg.time_start;
    d.t_end = cfg.time_end;
  } else if (fs::exists(dir / "manifest.json") &&
             read_json(dir / "manifest.json").contains("time_window")) {
    const json w = read_json(dir / "manifest.json")["time_window"];
    d.t_start = w.at(0).get<double>();
    d.t_end = w.at(1).get<double>();
  } else {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* evs : {&d.events_s, &d.events_t}) {
      for (const EdgeEvent& e : *evs) {
        lo = std::min(lo, e.timestamp);
        hi = std::max(hi, e.timestamp);
      }
    }
    if (!(lo < hi)) throw DataError("cannot infer a time window from events");
    d.t_start = lo;
    d.t_end = hi;
  }
  d.data_hash = hash_data_dir(data_dir);
  return d;
}

DynamicGraph snapshot_network(const RunConfig& cfg, const LoadedData& data,
                              bool source, bool static_ablation) {
  IngestOptions opts;
  opts.num_snapshots = cfg.num_snapshots.front();
  opts.t_start = data.t_start;
  opts.t_end = data.t_end;
  opts.directed = cfg.directed;
  opts.cumulative = cfg.cumulative;
  const double interval = cfg.snapshot_interval.front();
  if (interval > 0.0) {
    opts.t_start = data.t_end - interval * opts.num_snapshots;
    opts.fold_history = true;
  }
  const auto& events = source ? data.events_s : data.events_t;
  const int n = source ? data.source_ids.size() : data.target_ids.size();
  IngestResult r = ingest_edge_events(events, n, opts);
  if (r.ignored_removes > 0) {
    std::cerr << "warning: " << r.ignored_removes
              << " removes of absent edges ignored ("
              << (source ? "source" : "target") << ")\n";
  }
  return static_ablation ? r.graph.last_snapshot_only() : std::move(r.graph);
}

GenSummary cmd_gen_synth(const RunConfig& cfg, const std::string& out_dir) {
  const fs::path dir(out_dir);
  stage("gen-synth", [&] { ensure_dir(dir); });
  const SynthConfig sc = cfg.synth();
  const PlantedInstance inst =
      stage("generate", [&] { return generate_instance(sc); });

  // Ids are written as view-local integers and listed in full in the
  // sidecars so that users without edges keep their index.
  IdMap ids_s, ids_t;
  for (int i = 0; i < inst.num_source; ++i) ids_s.intern(std::to_string(i));
  for (int i = 0; i < inst.num_target; ++i) ids_t.intern(std::to_string(i));
  const std::string hash = cfg.hash();
  const std::string header = "# config_hash=" + hash + "\n";

  stage("write", [&] {
    for (auto [name, ids] : {std::pair{"source_ids.txt", &ids_s},
                             std::pair{"target_ids.txt", &ids_t}}) {
      auto out = open_out(dir / name);
      out << header;
      write_id_map(out, *ids);
    }
    for (auto [name, events, ids] :
         {std::tuple{"source_events.txt", &inst.events_s, &ids_s},
          std::tuple{"target_events.txt", &inst.events_t, &ids_t}}) {
      auto out = open_out(dir / name);
      out << header;
      write_edge_events(out, *events, ids);
    }
    for (auto [name, anchors] : {std::pair{"anchors_train.txt", &inst.train_anchors},
                                 std::pair{"anchors_test.txt", &inst.test_anchors}}) {
      auto out = open_out(dir / name);
      out << header;
      write_anchors(out, *anchors, &ids_s, &ids_t);
    }
  });

  GenSummary s;
  s.num_source = inst.num_source;
  s.num_target = inst.num_target;
  s.num_truth = static_cast<int>(inst.truth.size());
  s.overlap = overlap_rate(s.num_truth, s.num_source, s.num_target);
  s.data_hash = hash_data_dir(out_dir);

  json manifest = {{"config_hash", hash},
                   {"config", cfg.canonical()},
                   {"data_hash", s.data_hash},
                   {"num_source", s.num_source},
                   {"num_target", s.num_target},
                   {"num_truth", s.num_truth},
                   {"num_train", inst.train_anchors.size()},
                   {"num_test", inst.test_anchors.size()},
                   {"overlap_rate", s.overlap},
                   {"time_window", {0.0, static_cast<double>(sc.num_snapshots)}}};
  stage("write", [&] { write_json(dir / "manifest.json", manifest); });
  return s;
}

TrainSummary cmd_train(const RunConfig& cfg, const std::string& data_dir,
                       const std::string& out_dir, bool static_ablation) {
  const fs::path dir(out_dir);
  stage("train", [&] { ensure_dir(dir); });
  const LoadedData data = stage("ingest", [&] { return load_data(cfg, data_dir); });
  const DynamicGraph g_s = stage(
      "ingest", [&] { return snapshot_network(cfg, data, true, static_ablation); });
  const DynamicGraph g_t = stage(
      "ingest", [&] { return snapshot_network(cfg, data, false, static_ablation); });

  const EgoTensor ego_s =
      stage("ego", [&] { return cached_ego_tensor(cfg, g_s, data_dir); });
  const EgoTensor ego_t =
      stage("ego", [&] { return cached_ego_tensor(cfg, g_t, data_dir); });
  const SparseMatrix lap_s = consistency_laplacian(cfg, g_s);
  const SparseMatrix lap_t = consistency_laplacian(cfg, g_t);
  const IndicationPair anchors = stage("anchors", [&] {
    return build_indication(data.train, g_s.num_users(), g_t.num_users());
  });

  const NetParams init_s = NetParams::random(cfg.ego_width, cfg.dual_dim, cfg.seed);
  const NetParams init_t = NetParams::random(
      cfg.ego_width, cfg.dual_dim, cfg.shared_init ? cfg.seed : cfg.seed + 1);
  const std::string hash = cfg.hash();

  AlternatingResult result;
  try {
    result = stage("optimize", [&] {
      return run_alternating({ego_s, lap_s}, {ego_t, lap_t}, init_s, init_t,
                             anchors, cfg.train(0), cfg.train(1),
                             cfg.weights(), cfg.identity_dim, cfg.schedule());
    });
  } catch (const DivergenceError& e) {
    auto out = open_out(dir / "trace.csv");
    write_trace_csv(out, e.trace(), hash);
    throw;
  }

  stage("write", [&] {
    {
      auto out = open_out(dir / "trace.csv");
      write_trace_csv(out, result.trace, hash);
    }
    for (auto [name, p] : {std::pair{"params_s.txt", &result.params_s},
                           std::pair{"params_t.txt", &result.params_t}}) {
      auto out = open_out(dir / name);
      write_params(out, *p, hash);
    }
    const SubspaceState& st = result.state;
    for (auto [name, m] : {std::pair{"V_s.csv", &st.v_s}, std::pair{"V_t.csv", &st.v_t},
                           std::pair{"Q_s.csv", &st.q_s}, std::pair{"Q_t.csv", &st.q_t}}) {
      auto out = open_out(dir / name);
      write_matrix_csv(out, *m, hash);
    }
    for (auto [name, m, ids] :
         {std::tuple{"U_s.csv", &st.u_s, &data.source_ids},
          std::tuple{"U_t.csv", &st.u_t, &data.target_ids}}) {
      auto out = open_out(dir / name);
      out << "# config_hash=" << hash << '\n';
      write_embedding_csv(out, *m, &ids->names());
    }
  });

  TrainSummary s;
  s.rounds = result.state.round;
  s.converged = result.converged;
  s.final_objective = result.trace.empty() ? result.initial_objective
                                           : result.trace.back().j_total;
  s.trace = result.trace;
  json model = {{"config_hash", hash},
                {"data_hash", data.data_hash},
                {"static_ablation", static_ablation},
                {"rounds", s.rounds},
                {"converged", s.converged},
                {"initial_objective", result.initial_objective},
                {"final_objective", s.final_objective},
                {"num_source", g_s.num_users()},
                {"num_target", g_t.num_users()},
                {"num_snapshots", g_s.num_snapshots()}};
  stage("write", [&] { write_json(dir / "model.json", model); });
  return s;
}

EvalSummary cmd_eval(const RunConfig& cfg, const std::string& model_dir,
                     const std::string& data_dir, const std::string& out_dir,
                     bool force) {
  const fs::path mdir(model_dir);
  const fs::path dir(out_dir);
  stage("eval", [&] { ensure_dir(dir); });
  const json model = stage("eval", [&] { return read_json(mdir / "model.json"); });
  const LoadedData data = stage("ingest", [&] { return load_data(cfg, data_dir); });
  if (model.at("data_hash").get<std::string>() != data.data_hash && !force) {
    throw DataError("eval: model was trained on different data (use --force)");
  }
  const Eigen::MatrixXd v_s =
      stage("eval", [&] { return read_matrix_file(mdir / "V_s.csv"); });
  const Eigen::MatrixXd v_t =
      stage("eval", [&] { return read_matrix_file(mdir / "V_t.csv"); });
  if (v_s.rows() != data.source_ids.size() ||
      v_t.rows() != data.target_ids.size()) {
    throw DataError("eval: embedding rows do not match the data's user counts");
  }
  if (data.test.empty()) throw DataError("eval: no test anchors");

  const bool static_ablation = model.value("static_ablation", false);
  const EvalModes modes = cfg.eval_modes(static_ablation);
  const GroundTruth test = to_truth(data.test);
  const GroundTruth train = to_truth(data.train);

  EvalSummary s;
  s.static_ablation = static_ablation;
  s.entries = stage("eval", [&] {
    return evaluate(v_s, v_t, test, train, cfg.ks, modes);
  });
  s.overlap = overlap_rate(static_cast<long>(data.train.size() + data.test.size()),
                           data.source_ids.size(), data.target_ids.size());

  const std::string hash = cfg.hash();
  json report = {{"config_hash", hash},
                 {"model_config_hash", model.at("config_hash")},
                 {"data_hash", data.data_hash},
                 {"overlap_rate", s.overlap},
                 {"num_source", data.source_ids.size()},
                 {"num_target", data.target_ids.size()},
                 {"n_test_anchors", data.test.size()},
                 {"modes",
                  {{"distance", distance_name(modes.distance)},
                   {"exclude_train_targets", modes.exclude_train_targets},
                   {"symmetric", modes.symmetric},
                   {"static_ablation", modes.static_ablation}}},
                 {"entries", entries_json(s.entries)}};
  stage("write", [&] {
    write_json(dir / "report.json", report);
    RankOptions opts;
    opts.distance = modes.distance;
    if (modes.exclude_train_targets) {
      for (const AnchorPair& a : data.train) opts.excluded_targets.push_back(a.target);
    }
    std::vector<int> sources;
    for (const auto& kv : test) sources.push_back(kv.first);
    const int k_max = *std::max_element(cfg.ks.begin(), cfg.ks.end());
    auto out = open_out(dir / "candidates.csv");
    write_candidates_csv(out, rank_candidates(v_s, v_t, sources, k_max, opts),
                         hash, &data.source_ids.names(),
                         &data.target_ids.names());
  });
  return s;
}

std::vector<PipelineRun> cmd_pipeline(const RunConfig& cfg,
                                      const std::string& out_dir,
                                      bool static_ablation, bool force) {
  std::vector<PipelineRun> runs;
  const bool multi = cfg.is_sweep() || cfg.repeats > 1;
  const fs::path root(out_dir);
  stage("pipeline", [&] { ensure_dir(root); });

  for (double lambda : cfg.lambda) {
    for (double eta : cfg.eta) {
      for (int m : cfg.num_snapshots) {
        for (double interval : cfg.snapshot_interval) {
          for (int r = 0; r < cfg.repeats; ++r) {
            RunConfig c = cfg;
            c.lambda = {lambda};
            c.eta = {eta};
            c.num_snapshots = {m};
            c.snapshot_interval = {interval};
            c.seed = cfg.seed + static_cast<std::uint64_t>(r);
            c.repeats = 1;

            PipelineRun run;
            run.lambda = lambda;
            run.eta = eta;
            run.num_snapshots = m;
            run.snapshot_interval = interval;
            run.seed = c.seed;
            run.label = format_label(lambda, eta, m, interval, c.seed);
            const fs::path dir = multi ? root / "runs" / run.label : root;

            cmd_gen_synth(c, (dir / "data").string());
            cmd_train(c, (dir / "data").string(), (dir / "model").string(), false);
            run.dynamic = cmd_eval(c, (dir / "model").string(),
                                   (dir / "data").string(),
                                   (dir / "eval").string(), force);
            if (static_ablation) {
              cmd_train(c, (dir / "data").string(),
                        (dir / "model_static").string(), true);
              run.static_run = cmd_eval(c, (dir / "model_static").string(),
                                        (dir / "data").string(),
                                        (dir / "eval_static").string(), force);
            }
            runs.push_back(std::move(run));
          }
        }
      }
    }
  }

  if (multi) {
    auto out = open_out(root / "sweep.csv");
    out.precision(17);
    out << "# config_hash=" << cfg.hash() << '\n';
    out << "label,lambda,eta,num_snapshots,snapshot_interval,seed,mode,k,"
           "precision_at_k,map_at_k\n";
    // (point, mode, k) -> samples of (precision, map)
    std::map<std::tuple<double, double, int, double, std::string, int>,
             std::vector<std::pair<double, double>>>
        groups;
    for (const PipelineRun& run : runs) {
      auto emit = [&](const EvalSummary& s, const std::string& mode) {
        for (const EvalEntry& e : s.entries) {
          out << run.label << ',' << run.lambda << ',' << run.eta << ','
              << run.num_snapshots << ',' << run.snapshot_interval << ','
              << run.seed << ',' << mode << ',' << e.k << ','
              << e.precision_at_k << ',' << e.map_at_k << '\n';
          groups[{run.lambda, run.eta, run.num_snapshots,
                  run.snapshot_interval, mode, e.k}]
              .emplace_back(e.precision_at_k, e.map_at_k);
        }
      };
      emit(run.dynamic, "dynamic");
      if (run.static_run) emit(*run.static_run, "static");
    }

    json summary = {{"config_hash", cfg.hash()}, {"points", json::array()}};
    for (const auto& [key, samples] : groups) {
      const auto& [lambda, eta, m, interval, mode, k] = key;
      const int n = static_cast<int>(samples.size());
      auto stats = [&](bool precision) {
        double mean = 0.0;
        for (const auto& s : samples) mean += precision ? s.first : s.second;
        mean /= n;
        double var = 0.0;
        for (const auto& s : samples) {
          const double d = (precision ? s.first : s.second) - mean;
          var += d * d;
        }
        const double sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
        return json{{"mean", mean},
                    {"ci95", n > 1 ? t_critical_95(n - 1) * sd / std::sqrt(n) : 0.0}};
      };
      summary["points"].push_back({{"lambda", lambda},
                                   {"eta", eta},
                                   {"num_snapshots", m},
                                   {"snapshot_interval", interval},
                                   {"mode", mode},
                                   {"k", k},
                                   {"runs", n},
                                   {"precision_at_k", stats(true)},
                                   {"map_at_k", stats(false)}});
    }
    write_json(root / "summary.json", summary);
  }
  return runs;
}

int run_command(const CommandLine& cli) {
  RunConfig cfg;
  try {
    cfg = load_config(cli.config_path);
    if (cli.seed) {
      cfg.seed = *cli.seed;
      cfg.validate();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (cli.command == "gen-synth") {
      const GenSummary s = cmd_gen_synth(cfg, cli.out_dir);
      std::cout << "wrote " << s.num_source << " + " << s.num_target
                << " users, " << s.num_truth << " anchors, overlap "
                << s.overlap << '\n';
    } else if (cli.command == "train") {
      const TrainSummary s =
          cmd_train(cfg, cli.data_dir, cli.out_dir, cli.static_ablation);
      std::cout << "rounds " << s.rounds << ", objective " << s.final_objective
                << (s.converged ? " (converged)" : "") << '\n';
    } else if (cli.command == "eval") {
      const EvalSummary s = cmd_eval(cfg, cli.model_dir, cli.data_dir,
                                     cli.out_dir, cli.force);
      for (const EvalEntry& e : s.entries) {
        std::cout << "K=" << e.k << " precision " << e.precision_at_k
                  << " map " << e.map_at_k << '\n';
      }
    } else if (cli.command == "pipeline") {
      const auto runs =
          cmd_pipeline(cfg, cli.out_dir, cli.static_ablation, cli.force);
      for (const PipelineRun& r : runs) {
        for (const EvalEntry& e : r.dynamic.entries) {
          std::cout << r.label << " K=" << e.k << " precision "
                    << e.precision_at_k << " map " << e.map_at_k;
          if (r.static_run) {
            for (const EvalEntry& st : r.static_run->entries) {
              if (st.k == e.k) {
                std::cout << " | static precision " << st.precision_at_k
                          << " map " << st.map_at_k;
              }
            }
          }
          std::cout << '\n';
        }
      }
    } else {
      std::cerr << "unknown command '" << cli.command << "'\n";
      return kExitConfigError;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kExitNumericalAbort;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace dynalign
