// Copyright 2026 The Synloco Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the command line tool end to end on tiny configs.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "synloco/config.h"
#include "synloco/gait_planner.h"
#include "synloco/trainer.h"

namespace synloco {
namespace {

namespace fs = std::filesystem;

const fs::path& Root() {
  static const fs::path root = [] {
    fs::path p = fs::path(::testing::TempDir()) / "synloco_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(SYNLOCO_CLI) + " " + args + " >>" +
                          (Root() / "log.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int CountDataRows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  return rows;
}

// Small enough for a few seconds of training.
RunConfig TinyConfig() {
  RunConfig c;
  c.network.hidden = {16, 16};
  c.train.num_envs = 2;
  c.train.horizon = 8;
  c.train.iterations = 4;
  c.train.checkpoint_every = 2;
  c.eval.duration = 2.0;
  return c;
}

fs::path WriteConfig(const std::string& name, const RunConfig& c) {
  const fs::path p = Root() / name;
  WriteRunConfig(p.string(), c);
  return p;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = new fs::path(WriteConfig("tiny.json", TinyConfig()));
    ASSERT_EQ(RunCli("bc-fit --config " + config_->string() + " --out " +
                  (Root() / "fit").string()),
              0);
  }
  static void TearDownTestSuite() { delete config_; }

  static std::string Config() { return config_->string(); }
  static std::string Model() { return (Root() / "fit" / "planner.json").string(); }

 private:
  static fs::path* config_;
};

fs::path* CliTest::config_ = nullptr;

TEST_F(CliTest, BcFitWritesArtifactsDeterministically) {
  EXPECT_TRUE(fs::exists(Root() / "fit" / "fit_report.csv"));
  EXPECT_TRUE(fs::exists(Root() / "fit" / "config.json"));
  const fs::path again = Root() / "fit_again";
  ASSERT_EQ(RunCli("bc-fit --config " + Config() + " --out " + again.string()), 0);
  EXPECT_EQ(Slurp(again / "planner.json"), Slurp(Model()));
  // Rerunning from the written config reproduces the same model.
  const fs::path rerun = Root() / "fit_rerun";
  ASSERT_EQ(RunCli("bc-fit --config " + (Root() / "fit" / "config.json").string() +
                " --out " + rerun.string()),
            0);
  EXPECT_EQ(Slurp(rerun / "planner.json"), Slurp(Model()));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  RunConfig zero = TinyConfig();
  zero.train.num_envs = 0;
  const fs::path zero_path = WriteConfig("zero_envs.json", zero);
  EXPECT_EQ(RunCli("train --config " + zero_path.string() + " --model " + Model() +
                " --out " + (Root() / "zero").string()),
            2);
  EXPECT_FALSE(fs::exists(Root() / "zero"));
  EXPECT_EQ(RunCli("train --config " + Config() + " --model " + Model() +
                " --envs 0 --out " + (Root() / "zero2").string()),
            2);
  std::ofstream(Root() / "unknown.json") << R"({"train": {"num_envz": 2}})";
  EXPECT_EQ(RunCli("bc-fit --config " + (Root() / "unknown.json").string()), 2);
  EXPECT_EQ(RunCli("train --config " + Config()), 2);  // no planner
  EXPECT_EQ(RunCli("bc-fit --demo " + (Root() / "missing.csv").string() +
                " --out " + (Root() / "nodemo").string()),
            2);
  EXPECT_EQ(RunCli("no-such-command"), 2);
}

TEST_F(CliTest, DivergenceExitsThree) {
  RunConfig c = TinyConfig();
  c.env.sim.divergence_limit = 0.5;  // below the standing joint angles
  const fs::path p = WriteConfig("diverge.json", c);
  EXPECT_EQ(RunCli("train --config " + p.string() + " --model " + Model() +
                " --out " + (Root() / "diverge").string()),
            3);
}

TEST_F(CliTest, TrainEvalAndResume) {
  const fs::path full = Root() / "train_full";
  ASSERT_EQ(RunCli("train --config " + Config() + " --model " + Model() +
                " --out " + full.string()),
            0);
  EXPECT_TRUE(fs::exists(full / "checkpoint_latest.bin"));
  EXPECT_TRUE(fs::exists(full / "checkpoints" / "ckpt_000002.bin"));
  EXPECT_EQ(CountDataRows(full / "metrics.csv"), 4);

  // Resume from the midway checkpoint into a fresh directory.
  const fs::path resumed = Root() / "train_resumed";
  RunConfig other = TinyConfig();
  other.ppo.clip = 0.3;
  const fs::path other_path = WriteConfig("other.json", other);
  EXPECT_EQ(RunCli("train --config " + other_path.string() + " --model " +
                   Model() + " --out " + (Root() / "resume_refused").string() +
                   " --checkpoint " +
                   (full / "checkpoints" / "ckpt_000002.bin").string()),
            2);
  ASSERT_EQ(RunCli("train --config " + Config() + " --model " + Model() +
                " --out " + resumed.string() + " --checkpoint " +
                (full / "checkpoints" / "ckpt_000002.bin").string()),
            0);
  const CheckpointContents a =
      ReadCheckpoint((full / "checkpoint_latest.bin").string());
  const CheckpointContents b =
      ReadCheckpoint((resumed / "checkpoint_latest.bin").string());
  EXPECT_EQ(a.iteration, 4);
  EXPECT_EQ(b.iteration, 4);
  EXPECT_EQ(a.policy.actor.flat, b.policy.actor.flat);
  EXPECT_EQ(a.policy.critic.flat, b.policy.critic.flat);
  EXPECT_EQ(a.policy.log_std, b.policy.log_std);
  // The resumed run logs iterations 2 and 3 exactly as the full run did.
  const std::string full_metrics = Slurp(full / "metrics.csv");
  const std::string resumed_metrics = Slurp(resumed / "metrics.csv");
  const size_t tail = resumed_metrics.find('\n') + 1;
  ASSERT_GT(resumed_metrics.size(), tail);
  EXPECT_EQ(CountDataRows(resumed / "metrics.csv"), 2);
  EXPECT_TRUE(full_metrics.ends_with(resumed_metrics.substr(tail)));

  // Evaluation at 50 Hz over the configured two seconds.
  const fs::path eval = Root() / "eval";
  ASSERT_EQ(RunCli("eval --checkpoint " + (full / "checkpoint_latest.bin").string() +
                " --out " + eval.string()),
            0);
  EXPECT_NEAR(CountDataRows(eval / "eval_trace.csv"), 100, 1);
  EXPECT_TRUE(fs::exists(eval / "eval_summary.json"));

  // A config that trains differently is refused.
  EXPECT_EQ(RunCli("eval --config " + other_path.string() + " --checkpoint " +
                (full / "checkpoint_latest.bin").string() + " --out " +
                (Root() / "eval_refused").string()),
            2);
  EXPECT_FALSE(fs::exists(Root() / "eval_refused" / "eval_trace.csv"));
}

TEST_F(CliTest, ExportGait) {
  const fs::path out = Root() / "gait";
  ASSERT_EQ(RunCli("export-gait --model " + Model() + " --out " + out.string()),
            0);
  const GaitPlannerModel model = LoadGaitPlannerModel(Model(), nullptr);
  EXPECT_EQ(CountDataRows(out / "gait_baseline.csv"),
            2 * model.orbit.period_ticks * kNumLegs);
  const fs::path again = Root() / "gait_again";
  ASSERT_EQ(RunCli("export-gait --model " + Model() + " --out " + again.string()),
            0);
  EXPECT_EQ(Slurp(out / "gait_baseline.csv"),
            Slurp(again / "gait_baseline.csv"));
}

}  // namespace
}  // namespace synloco
