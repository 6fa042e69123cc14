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

#ifndef SYNLOCO_BEHAVIOR_CLONING_H_
#define SYNLOCO_BEHAVIOR_CLONING_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "synloco/gait_planner.h"
#include "synloco/kinematics.h"

namespace synloco {

// Foot-end trajectories of a demonstrated gait in the body frame. All legs
// share the time stamps.
struct DemoTrajectory {
  std::vector<double> times;  // s, strictly increasing
  std::array<std::vector<Eigen::Vector3d>, kNumLegs> feet;
  double sample_rate = 0.0;     // Hz
  double gait_frequency = 0.0;  // Hz

  int size() const { return static_cast<int>(times.size()); }
};

// Throws InvalidParams if legs differ in length, times are not strictly
// increasing, or the trajectory spans less than one gait period.
void ValidateDemo(const DemoTrajectory& demo);

struct DemoTrotParams {
  double frequency = 1.5;         // Hz
  double clearance_front = 0.07;  // m
  double clearance_rear = 0.04;   // m
  double step_length = 0.08;      // m
  double stance_fraction = 0.6;
  double sample_rate = 120.0;  // Hz
  double stand_height = 0.32;  // m
  int num_periods = 2;
};

// Synthetic trot: straight backward stance sweep at stand height, half-sine
// swing lift. FR/RL share phase, FL/RR lag by half a period and the phase
// origin is FR liftoff.
DemoTrajectory GenerateDemoTrot(const DemoTrotParams& params,
                                const RobotGeometry& robot);

// CSV with header `t,leg,x,y,z`. Rows for different legs may interleave.
// The gait frequency is measured from front-right liftoffs unless
// `gait_frequency` is positive.
DemoTrajectory LoadDemoCsv(const std::string& path,
                           double gait_frequency = 0.0);
void WriteDemoCsv(const std::string& path, const DemoTrajectory& demo);

// One gait period of the demo resampled to `samples_per_period` points by
// periodic linear interpolation in gait phase. Phase zero is the last
// stance sample of the first front-right liftoff.
std::array<std::vector<Eigen::Vector3d>, kNumLegs> ResampleDemo(
    const DemoTrajectory& demo, int samples_per_period);

struct FitOptions {
  double ridge = 1e-6;
  int refine_steps = 2000;
  double refine_step_size = 1e-2;
  double train_fraction = 0.7;
  uint64_t split_seed = 0;
};

// Mean squared foot-position errors in m^2, averaged over samples and legs.
struct FitReport {
  double init_train_mse = 0.0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  int num_train = 0;
  int num_val = 0;
  std::array<double, kNumLegs> demo_clearance{};
  std::array<double, kNumLegs> fit_clearance{};

  double ValRmse() const;
};

struct FitResult {
  MotorLayer motor;
  FitReport report;
};

// Least-squares fit of the motor layer on IK joint targets followed by
// gradient descent on the foot-space MSE through forward kinematics.
// Throws IkUnreachable for demo points outside the leg workspace and
// SingularFit if the design matrix is rank deficient.
FitResult FitMotorLayer(const DemoTrajectory& demo,
                        const GaitPlannerModel& model,
                        const RobotGeometry& robot,
                        const FitOptions& options);

// Mean squared foot error of `motor` over the given orbit sample indices.
// If `gradient` is given it receives the analytic derivative with respect
// to the weights and bias, the one used by the refinement stage.
double FootSpaceMse(
    const GaitPlannerModel& model, const MotorLayer& motor,
    const RobotGeometry& robot,
    const std::array<std::vector<Eigen::Vector3d>, kNumLegs>& targets,
    const std::vector<int>& indices, MotorLayer* gradient = nullptr);

}  // namespace synloco

#endif  // SYNLOCO_BEHAVIOR_CLONING_H_
