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

#ifndef SYNLOCO_GAIT_PLANNER_H_
#define SYNLOCO_GAIT_PLANNER_H_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "synloco/kinematics.h"
#include "synloco/oscillator.h"

namespace synloco {

// Gaussian radial basis functions keyed to points on the oscillator limit
// cycle.
struct RbfLayer {
  std::vector<OscillatorState> centers;
  double sigma = 0.1;

  int size() const { return static_cast<int>(centers.size()); }
};

// Linear map from H activations to the 12 baseline joint targets:
// targets = weights^T * activations + bias.
struct MotorLayer {
  Eigen::MatrixXd weights;  // H x 12
  JointVector bias = JointVector::Zero();
};

struct GaitPlannerModel {
  OscillatorParams params;
  PeriodicOrbit orbit;
  RbfLayer rbf;
  MotorLayer motor;
};

// Center h is orbit.samples[floor(h * period_ticks / H)]. Throws
// TooManyCenters when H exceeds the period, InvalidParams when H < 1.
std::vector<OscillatorState> SampleRbfCenters(const PeriodicOrbit& orbit,
                                              int num_centers);

Eigen::VectorXd RbfActivations(const OscillatorState& state,
                               const RbfLayer& rbf);

JointVector PlannerForward(const OscillatorState& state,
                           const GaitPlannerModel& model);

// Finds the limit cycle, places the centers and sets up a zero motor layer
// whose bias is `bias`.
GaitPlannerModel BuildGaitPlanner(const OscillatorParams& params,
                                  int num_centers, double sigma,
                                  const JointVector& bias,
                                  int burn_in_ticks = kMinBurnInTicks);

// Throws InvalidParams describing the first violated invariant.
void ValidateGaitPlannerModel(const GaitPlannerModel& model);

// Open-loop runtime planner: the oscillator state of one robot.
class GaitPlanner {
 public:
  explicit GaitPlanner(std::shared_ptr<const GaitPlannerModel> model);

  // Restarts the rhythm at the phase origin (orbit sample 0).
  void Reset();
  void Advance(int ticks);
  JointVector Signal() const { return PlannerForward(state_, *model_); }

  const OscillatorState& state() const { return state_; }
  void set_state(const OscillatorState& state) { state_ = state; }
  const GaitPlannerModel& model() const { return *model_; }

 private:
  std::shared_ptr<const GaitPlannerModel> model_;
  OscillatorState state_;
};

// Baseline joint targets and the corresponding body-frame foot positions
// over `num_periods` periods of the orbit, one entry per tick.
struct BaselineTrajectory {
  std::vector<JointVector> joints;
  std::vector<std::array<Eigen::Vector3d, kNumLegs>> feet;
};
BaselineTrajectory SampleBaseline(const GaitPlannerModel& model,
                                  const RobotGeometry& robot,
                                  int num_periods);

// Peak-to-trough foot height over one period of the baseline, per leg.
std::array<double, kNumLegs> BaselineClearance(const GaitPlannerModel& model,
                                               const RobotGeometry& robot);

// Model files are JSON documents; the robot geometry is stored alongside so
// that exported foot trajectories use the geometry the model was fit on.
void SaveGaitPlannerModel(const std::string& path,
                          const GaitPlannerModel& model,
                          const RobotGeometry& robot);
GaitPlannerModel LoadGaitPlannerModel(const std::string& path,
                                      RobotGeometry* robot = nullptr);
std::string GaitPlannerModelToString(const GaitPlannerModel& model,
                                     const RobotGeometry& robot);
// `path` only labels error messages.
GaitPlannerModel GaitPlannerModelFromString(const std::string& text,
                                            const std::string& path,
                                            RobotGeometry* robot = nullptr);

}  // namespace synloco

#endif  // SYNLOCO_GAIT_PLANNER_H_
