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

// Steps shared by the command line tool and the acceptance checks.

#ifndef SYNLOCO_PIPELINE_H_
#define SYNLOCO_PIPELINE_H_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "synloco/behavior_cloning.h"
#include "synloco/config.h"
#include "synloco/gait_planner.h"
#include "synloco/rl.h"
#include "synloco/simulator.h"

namespace synloco {

struct FittedPlanner {
  GaitPlannerModel model;
  FitReport report;
};

// Builds the oscillator, orbit and RBF layer and clones the configured
// demonstration. The train/validation split is drawn from the master seed.
FittedPlanner FitPlannerFromConfig(const RunConfig& config);

// Checkpoint header: resolved config, its hash and the planner, so a
// checkpoint is self-contained for evaluation.
std::string MakeCheckpointHeader(const RunConfig& config,
                                 const GaitPlannerModel& planner);
struct CheckpointHeader {
  RunConfig config;
  uint64_t config_hash = 0;
  std::shared_ptr<GaitPlannerModel> planner;
};
CheckpointHeader ParseCheckpointHeader(const std::string& header);

struct EvalSample {
  double time = 0.0;  // s, after the step
  double command_vx = 0.0;
  RobotState state;
  JointVector planner_signal = JointVector::Zero();
  JointVector residual = JointVector::Zero();
  Termination termination = Termination::kRunning;
};

struct EvalSummary {
  int steps = 0;
  int falls = 0;
  double mean_vx = 0.0, std_vx = 0.0;  // body-frame forward velocity
  double mean_height = 0.0, std_height = 0.0;
  double mean_pitch = 0.0, std_pitch = 0.0;
  double mean_roll = 0.0, std_roll = 0.0;
  double displacement = 0.0;  // horizontal distance from the start, m
  std::array<double, kNumLegs> stance_fraction{};
  // Circular cross-correlation peaks of the contact logs, in policy steps.
  int lag_fr_rl = 0;
  int lag_fl_rr = 0;
  int lag_fr_fl = 0;
};

struct EvalResult {
  std::vector<EvalSample> samples;
  EvalSummary summary;
};

// Deterministic rollout of the policy mean in a noise-free environment
// (dynamics randomization only if the eval config asks for it) following
// the configured command profile. One sample per policy step.
EvalResult Evaluate(const RunConfig& config,
                    std::shared_ptr<const GaitPlannerModel> planner,
                    const PolicyState& policy);

EvalSummary SummarizeEval(const std::vector<EvalSample>& samples,
                          const Eigen::Vector3d& start_position);

std::string EvalTraceCsvHeader();
void WriteEvalTraceCsv(const std::string& path, const EvalResult& result,
                       const RobotGeometry& robot);
std::string EvalSummaryJson(const EvalSummary& summary);

// Baseline joint targets and body-frame feet, `num_periods` orbit periods,
// one row per tick and leg.
std::string GaitExportCsvHeader();
void WriteGaitExportCsv(const std::string& path, const GaitPlannerModel& model,
                        const RobotGeometry& robot, int num_periods);

// Column check used on load: the header must match exactly and every row
// must have the same number of fields. Returns the number of data rows.
int CheckCsvSchema(const std::string& path, const std::string& header);

}  // namespace synloco

#endif  // SYNLOCO_PIPELINE_H_
