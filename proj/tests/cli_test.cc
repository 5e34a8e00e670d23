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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "json.hpp"

#include "dynalign/config.h"
#include "dynalign/pipeline.h"

namespace dynalign {
namespace {

namespace fs = std::filesystem;

constexpr const char* kTinyConfig =
    "n_base = 45\n"
    "synth_periods = 3\n"
    "num_snapshots = 3\n"
    "ego_width = 4\n"
    "dual_dim = 6\n"
    "identity_dim = 4\n"
    "pretrain_epochs = 2\n"
    "epochs_per_round = 1\n"
    "max_rounds = 2\n"
    "eta = 0.3\n";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dynalign_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write_config("tiny.cfg", kTinyConfig);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write_config(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(DYNALIGN_BINARY) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, GenSynthIsByteIdentical) {
  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("a")), 0);
  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("b")), 0);
  for (const char* f : {"source_events.txt", "target_events.txt", "anchors_train.txt",
                        "anchors_test.txt", "source_ids.txt", "manifest.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("c") +
                " --seed 7"),
            0);
  EXPECT_NE(slurp(dir_ / "a" / "source_events.txt"),
            slurp(dir_ / "c" / "source_events.txt"));
}

TEST_F(Cli, ManifestRecordsConfig) {
  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("d")), 0);
  const auto m = nlohmann::json::parse(slurp(dir_ / "d" / "manifest.json"));
  std::istringstream in(kTinyConfig);
  const RunConfig cfg = parse_config(in);
  EXPECT_EQ(m["config"].get<std::string>(), cfg.canonical());
  EXPECT_EQ(m["config_hash"].get<std::string>(), cfg.hash());
  EXPECT_EQ(m["num_source"].get<int>(), 30);
  EXPECT_NEAR(m["overlap_rate"].get<double>(), 0.5, 1.0 / 60);
}

TEST_F(Cli, IdentityInstanceRoundTripsThroughIngest) {
  write_config("id.cfg", std::string(kTinyConfig) + "lambda = 1\nedge_noise = 0\n");
  ASSERT_EQ(run("gen-synth --config " + path("id.cfg") + " --out " + path("d")), 0);
  std::ifstream f(path("id.cfg"));
  const RunConfig cfg = parse_config(f);
  const LoadedData data = load_data(cfg, path("d"));
  const DynamicGraph gs = snapshot_network(cfg, data, true, false);
  const DynamicGraph gt = snapshot_network(cfg, data, false, false);
  ASSERT_EQ(gs.num_users(), 45);
  ASSERT_EQ(gt.num_users(), 45);
  for (int m = 0; m < 3; ++m) {
    EXPECT_EQ(gs.snapshot(m).num_edges(), gt.snapshot(m).num_edges());
  }
  EXPECT_EQ(static_cast<int>(data.train.size() + data.test.size()), 45);
}

TEST_F(Cli, TrainAndEvalProduceArtifacts) {
  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("d")), 0);
  ASSERT_EQ(run("train --config " + path("tiny.cfg") + " --data " + path("d") +
                " --out " + path("m")),
            0)
      << slurp(dir_ / "stderr.txt");
  for (const char* f : {"model.json", "params_s.txt", "params_t.txt", "V_s.csv",
                        "V_t.csv", "Q_s.csv", "Q_t.csv", "U_s.csv", "U_t.csv",
                        "trace.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "m" / f)) << f;
  }
  std::istringstream trace(slurp(dir_ / "m" / "trace.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(trace, line)) rows += !line.empty() && line[0] != '#';
  EXPECT_EQ(rows, 1 + 2);

  ASSERT_EQ(run("eval --config " + path("tiny.cfg") + " --model " + path("m") +
                " --data " + path("d") + " --out " + path("e")),
            0)
      << slurp(dir_ / "stderr.txt");
  const auto report = nlohmann::json::parse(slurp(dir_ / "e" / "report.json"));
  EXPECT_EQ(report["entries"].size(), 4u);
  EXPECT_NEAR(report["overlap_rate"].get<double>(), 0.5, 1.0 / 60);
  EXPECT_EQ(report["modes"]["distance"], "euclidean");
  EXPECT_EQ(slurp(dir_ / "e" / "candidates.csv").rfind("# config_hash=", 0), 0u);
}

TEST_F(Cli, ZeroRoundSmoke) {
  write_config("zero.cfg", std::string(kTinyConfig) + "max_rounds = 0\n");
  ASSERT_EQ(run("pipeline --config " + path("zero.cfg") + " --out " + path("p")), 0)
      << slurp(dir_ / "stderr.txt");
  EXPECT_TRUE(fs::exists(dir_ / "p" / "eval" / "report.json"));
}

TEST_F(Cli, EvalRefusesForeignData) {
  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("d1")), 0);
  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("d2") +
                " --seed 3"),
            0);
  ASSERT_EQ(run("train --config " + path("tiny.cfg") + " --data " + path("d1") +
                " --out " + path("m")),
            0);
  EXPECT_EQ(run("eval --config " + path("tiny.cfg") + " --model " + path("m") +
                " --data " + path("d2") + " --out " + path("e")),
            2);
  EXPECT_EQ(run("eval --config " + path("tiny.cfg") + " --model " + path("m") +
                " --data " + path("d2") + " --out " + path("e") + " --force"),
            0);
}

TEST_F(Cli, ExitCodes) {
  write_config("bad.cfg", "no_such_key = 1\n");
  EXPECT_EQ(run("gen-synth --config " + path("bad.cfg") + " --out " + path("x")), 1);
  EXPECT_EQ(run("gen-synth --config " + path("missing.cfg") + " --out " + path("x")), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("train --config " + path("tiny.cfg") + " --data " + path("nodata") +
                " --out " + path("m")),
            2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("ingest"), std::string::npos);

  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("d")), 0);
  {
    std::ofstream(dir_ / "d" / "source_events.txt", std::ios::app) << "1 2 oops a\n";
  }
  EXPECT_EQ(run("train --config " + path("tiny.cfg") + " --data " + path("d") +
                " --out " + path("m")),
            2);

  ASSERT_EQ(run("gen-synth --config " + path("tiny.cfg") + " --out " + path("d3")), 0);
  write_config("blowup.cfg", std::string(kTinyConfig) +
                                 "learning_rate = 1e300\nmax_rounds = 3\n");
  EXPECT_EQ(run("train --config " + path("blowup.cfg") + " --data " + path("d3") +
                " --out " + path("m3")),
            3)
      << slurp(dir_ / "stderr.txt");
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("numerical abort"), std::string::npos);
}

TEST_F(Cli, EnvironmentOverridesConfig) {
  ::setenv("DYNALIGN_N_BASE", "60", 1);
  const int code = run("gen-synth --config " + path("tiny.cfg") + " --out " + path("d"));
  ::unsetenv("DYNALIGN_N_BASE");
  ASSERT_EQ(code, 0);
  const auto m = nlohmann::json::parse(slurp(dir_ / "d" / "manifest.json"));
  EXPECT_EQ(m["num_source"].get<int>(), 40);
}

TEST_F(Cli, SweepWritesSummary) {
  write_config("sweep.cfg", std::string(kTinyConfig) +
                                "lambda = 0.5, 1\nrepeats = 2\nmax_rounds = 1\n");
  ASSERT_EQ(run("pipeline --config " + path("sweep.cfg") + " --out " + path("s")), 0)
      << slurp(dir_ / "stderr.txt");
  const auto summary = nlohmann::json::parse(slurp(dir_ / "s" / "summary.json"));
  EXPECT_EQ(summary["points"].size(), 2u * 4u);
  EXPECT_EQ(summary["points"][0]["runs"].get<int>(), 2);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "sweep.csv"));
  int runs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "s" / "runs")) runs += e.is_directory();
  EXPECT_EQ(runs, 4);
}

}  // namespace
}  // namespace dynalign
