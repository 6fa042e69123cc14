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

#ifndef SYNLOCO_CONFIG_H_
#define SYNLOCO_CONFIG_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "synloco/behavior_cloning.h"
#include "synloco/environment.h"
#include "synloco/oscillator.h"
#include "synloco/randomization.h"
#include "synloco/rl.h"
#include "synloco/task.h"
#include "synloco/trainer.h"

namespace synloco {

struct PlannerConfig {
  OscillatorParams oscillator;
  int num_centers = 20;
  double rbf_sigma = 0.1;
  int burn_in_ticks = kMinBurnInTicks;
};

struct DemoConfig {
  std::string source = "synthetic";  // or a CSV path
  double csv_gait_frequency = 0.0;   // 0 measures it from the CSV
  DemoTrotParams trot;
  FitOptions fit;
};

struct EvalConfig {
  std::string profile = "constant";  // constant | piecewise
  double command_vx = 0.5;           // constant profile, m/s
  // Piecewise-linear (time s, vx m/s) knots, held after the last one.
  std::vector<std::pair<double, double>> knots = {{0.0, 0.0}, {4.0, 1.0},
                                                  {5.0, 1.0}};
  double duration = 10.0;  // s
  bool dynamics_randomization = false;
};

double EvalCommandAt(const EvalConfig& eval, double t);

struct RunConfig {
  uint64_t seed = 1;
  std::string mode;  // filled in by the command that ran
  std::string out_dir = "out";
  PlannerConfig planner;
  DemoConfig demo;
  EnvConfig env;
  CurriculumConfig curriculum;
  NetworkConfig network;
  PpoConfig ppo;
  TrainConfig train;
  EvalConfig eval;
};

// Whole-config validation, run before any work starts.
void ValidateRunConfig(const RunConfig& config);

// JSON text. Missing keys keep their defaults; unknown keys and wrong
// types raise ConfigError naming the offending path.
RunConfig ParseRunConfig(const std::string& text);
RunConfig LoadRunConfig(const std::string& path);
std::string RunConfigToJson(const RunConfig& config);
void WriteRunConfig(const std::string& path, const RunConfig& config);

// FNV-1a over the canonical JSON of everything that shapes a trained
// policy: seed, mode, output directory and evaluation settings excluded.
uint64_t ConfigHash(const RunConfig& config);
std::string HashToHex(uint64_t hash);

}  // namespace synloco

#endif  // SYNLOCO_CONFIG_H_
