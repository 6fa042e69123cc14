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

// synloco: bc-fit | train | eval | export-gait

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synloco/config.h"
#include "synloco/errors.h"
#include "synloco/gait_planner.h"
#include "synloco/pipeline.h"
#include "synloco/trainer.h"

namespace fs = std::filesystem;

namespace synloco {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  std::string model;
  std::string checkpoint;
  std::optional<int> envs;
  std::optional<int> iterations;
  std::string demo;
  int periods = 2;
};

// Config file (or defaults) with command line overrides applied and the
// whole thing validated before any work starts.
RunConfig ResolveConfig(const Flags& f, const std::string& mode) {
  RunConfig c = f.config.empty() ? RunConfig{} : LoadRunConfig(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.envs) c.train.num_envs = *f.envs;
  if (f.iterations) c.train.iterations = *f.iterations;
  if (!f.demo.empty()) c.demo.source = f.demo;
  c.mode = mode;
  ValidateRunConfig(c);
  return c;
}

void PrepareOutDir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.out_dir);
  WriteRunConfig((fs::path(c.out_dir) / "config.json").string(), c);
}

int BcFit(const Flags& f) {
  const RunConfig c = ResolveConfig(f, "bc-fit");
  if (c.demo.source != "synthetic" && !fs::exists(c.demo.source)) {
    throw ConfigError("demo CSV not found: " + c.demo.source);
  }
  PrepareOutDir(c);
  const FittedPlanner fit = FitPlannerFromConfig(c);
  const std::string model_path =
      f.model.empty() ? (fs::path(c.out_dir) / "planner.json").string() : f.model;
  SaveGaitPlannerModel(model_path, fit.model, c.env.sim.robot);

  const FitReport& r = fit.report;
  std::ofstream report(fs::path(c.out_dir) / "fit_report.csv");
  report.precision(17);
  report << "metric,value\n"
         << "period_ticks," << fit.model.orbit.period_ticks << "\n"
         << "closure_error," << fit.model.orbit.closure_error << "\n"
         << "init_train_mse," << r.init_train_mse << "\n"
         << "train_mse," << r.train_mse << "\n"
         << "val_mse," << r.val_mse << "\n"
         << "val_rmse," << r.ValRmse() << "\n"
         << "num_train," << r.num_train << "\n"
         << "num_val," << r.num_val << "\n";
  for (Leg leg : kAllLegs) {
    const int l = LegIndex(leg);
    report << "demo_clearance_" << LegName(leg) << "," << r.demo_clearance[l]
           << "\nfit_clearance_" << LegName(leg) << "," << r.fit_clearance[l]
           << "\n";
  }
  std::printf("period %d ticks, val RMSE %.6g m, model %s\n",
              fit.model.orbit.period_ticks, r.ValRmse(), model_path.c_str());
  return kExitOk;
}

// Keeps the header and the rows of iterations before `first` so a resumed
// run continues the same file.
void TruncateMetrics(const std::string& path, int first) {
  std::ifstream in(path);
  if (!in) return;
  std::vector<std::string> keep;
  std::string line;
  if (std::getline(in, line)) keep.push_back(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (std::stoi(line.substr(0, line.find(','))) < first) keep.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : keep) out << l << "\n";
}

int Train(const Flags& f) {
  if (f.model.empty()) {
    throw ConfigError("train needs a fitted planner: run bc-fit, then pass --model");
  }
  const RunConfig c = ResolveConfig(f, "train");
  RobotGeometry model_robot;
  auto planner = std::make_shared<GaitPlannerModel>(
      LoadGaitPlannerModel(f.model, &model_robot));
  const RobotGeometry& robot = c.env.sim.robot;
  if (model_robot.hip_offset != robot.hip_offset ||
      model_robot.thigh_length != robot.thigh_length ||
      model_robot.calf_length != robot.calf_length ||
      model_robot.hip_mount_x != robot.hip_mount_x ||
      model_robot.hip_mount_y != robot.hip_mount_y) {
    throw ConfigError("planner was fit on a different robot geometry");
  }
  PrepareOutDir(c);
  const fs::path out(c.out_dir);
  fs::create_directories(out / "checkpoints");
  const std::string header = MakeCheckpointHeader(c, *planner);

  auto env_config = std::make_shared<EnvConfig>(c.env);
  Trainer trainer(env_config, planner, c.network, c.ppo, c.curriculum, c.train,
                  c.seed);
  const std::string metrics_path = (out / "metrics.csv").string();
  if (!f.checkpoint.empty()) {
    const CheckpointHeader saved =
        ParseCheckpointHeader(ReadCheckpoint(f.checkpoint).header);
    if (saved.config_hash != ConfigHash(c)) {
      throw ConfigError("checkpoint " + f.checkpoint + " was trained with config " +
                        HashToHex(saved.config_hash) + ", not " +
                        HashToHex(ConfigHash(c)));
    }
    trainer.LoadCheckpoint(f.checkpoint);
    if (fs::exists(metrics_path)) {
      TruncateMetrics(metrics_path, trainer.iteration());
    } else {
      std::ofstream(metrics_path) << MetricsCsvHeader() << "\n";
    }
    std::fprintf(stderr, "resumed at iteration %d\n", trainer.iteration());
  } else {
    std::ofstream(metrics_path, std::ios::trunc) << MetricsCsvHeader() << "\n";
  }

  const auto save = [&](int iteration) {
    char name[64];
    std::snprintf(name, sizeof(name), "ckpt_%06d.bin", iteration);
    trainer.SaveCheckpoint((out / "checkpoints" / name).string(), header);
    trainer.SaveCheckpoint((out / "checkpoint_latest.bin").string(), header);
  };

  std::ofstream metrics(metrics_path, std::ios::app);
  while (trainer.iteration() < c.train.iterations) {
    IterationMetrics m;
    try {
      m = trainer.RunIteration();
    } catch (const NumericalDivergence& e) {
      std::fprintf(stderr,
                   "numerical divergence in iteration %d (env %d): %s\n"
                   "last good checkpoint: %s\n",
                   trainer.iteration(), e.env_index(), e.what(),
                   (out / "checkpoint_latest.bin").c_str());
      return kExitNumerical;
    } catch (const NonFiniteLoss& e) {
      std::fprintf(stderr,
                   "non-finite loss in iteration %d (minibatch %d): %s\n"
                   "last good checkpoint: %s\n",
                   trainer.iteration(), e.minibatch(), e.what(),
                   (out / "checkpoint_latest.bin").c_str());
      return kExitNumerical;
    }
    metrics << MetricsCsvRow(m) << "\n";
    metrics.flush();
    std::fprintf(stderr,
                 "iter %4d  reward %+.5f  tracking %.3f  kl %.4f  lr %.2e\n",
                 m.iteration, m.mean_reward, m.tracking_fraction,
                 m.update.approx_kl, m.update.learning_rate);
    const int done = trainer.iteration();
    if (c.train.checkpoint_every > 0 && done % c.train.checkpoint_every == 0) {
      save(done);
    }
  }
  save(trainer.iteration());
  std::printf("trained %d iterations, checkpoint %s\n", trainer.iteration(),
              (out / "checkpoint_latest.bin").c_str());
  return kExitOk;
}

int Eval(const Flags& f) {
  if (f.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
  const CheckpointContents ckpt = ReadCheckpoint(f.checkpoint);
  const CheckpointHeader saved = ParseCheckpointHeader(ckpt.header);
  RunConfig c;
  if (!f.config.empty()) {
    c = ResolveConfig(f, "eval");
    if (ConfigHash(c) != saved.config_hash) {
      throw ConfigError("refusing to evaluate: config hash " +
                        HashToHex(ConfigHash(c)) + " does not match checkpoint " +
                        HashToHex(saved.config_hash));
    }
  } else {
    // Evaluation settings from the training run's own config.
    c = saved.config;
    if (f.seed) c.seed = *f.seed;
    c.out_dir = f.out.empty() ? (fs::path(f.checkpoint).parent_path() / "eval").string()
                              : f.out;
    c.mode = "eval";
    ValidateRunConfig(c);
  }
  PrepareOutDir(c);
  const EvalResult result = Evaluate(c, saved.planner, ckpt.policy);
  const fs::path out(c.out_dir);
  const std::string trace = (out / "eval_trace.csv").string();
  WriteEvalTraceCsv(trace, result, c.env.sim.robot);
  const int rows = CheckCsvSchema(trace, EvalTraceCsvHeader());
  const std::string summary = EvalSummaryJson(result.summary);
  std::ofstream(out / "eval_summary.json") << summary;
  std::printf("%d rows written to %s\n%s", rows, trace.c_str(), summary.c_str());
  return kExitOk;
}

int ExportGait(const Flags& f) {
  if (f.model.empty()) throw ConfigError("export-gait needs --model");
  if (f.periods < 1) throw ConfigError("--periods must be >= 1");
  RobotGeometry robot;
  const GaitPlannerModel model = LoadGaitPlannerModel(f.model, &robot);
  const std::string out_dir = f.out.empty() ? "." : f.out;
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / "gait_baseline.csv").string();
  WriteGaitExportCsv(path, model, robot, f.periods);
  const int rows = CheckCsvSchema(path, GaitExportCsvHeader());
  std::printf("%d ticks x %d legs written to %s\n", rows / kNumLegs, kNumLegs,
              path.c_str());
  return kExitOk;
}

template <class Fn> int Guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvalidParams& e) {
    std::fprintf(stderr, "invalid parameters: %s\n", e.what());
    return kExitConfig;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitConfig;
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalDivergence& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const NonFiniteLoss& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const SingularFit& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}

}  // namespace
}  // namespace synloco

int main(int argc, char** argv) {
  using namespace synloco;
  CLI::App app{"CPG gait planner with a residual locomotion policy"};
  app.require_subcommand(1);
  Flags f;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out", f.out, "output directory");
  };
  CLI::App* bc = app.add_subcommand("bc-fit", "fit the gait planner to a demonstration");
  common(bc);
  bc->add_option("--model", f.model, "where to write the planner (default <out>/planner.json)");
  bc->add_option("--demo", f.demo, "\"synthetic\" or a CSV with t,leg,x,y,z");

  CLI::App* train = app.add_subcommand("train", "train the residual policy");
  common(train);
  train->add_option("--model", f.model, "fitted planner from bc-fit");
  train->add_option("--checkpoint", f.checkpoint, "resume from this checkpoint")
      ->check(CLI::ExistingFile);
  train->add_option("--envs", f.envs, "parallel environments");
  train->add_option("--iterations", f.iterations, "total PPO iterations");

  CLI::App* eval = app.add_subcommand("eval", "roll out a trained policy");
  common(eval);
  eval->add_option("--checkpoint", f.checkpoint, "checkpoint to evaluate")
      ->check(CLI::ExistingFile);

  CLI::App* gait = app.add_subcommand("export-gait", "dump the open-loop baseline");
  gait->add_option("--model", f.model, "fitted planner")->check(CLI::ExistingFile);
  gait->add_option("--out", f.out, "output directory");
  gait->add_option("--periods", f.periods, "orbit periods to export");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (bc->parsed()) return Guarded([&] { return BcFit(f); });
  if (train->parsed()) return Guarded([&] { return Train(f); });
  if (eval->parsed()) return Guarded([&] { return Eval(f); });
  return Guarded([&] { return ExportGait(f); });
}
