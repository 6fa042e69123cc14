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

#ifndef SYNLOCO_TASK_H_
#define SYNLOCO_TASK_H_

#include <array>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "synloco/kinematics.h"
#include "synloco/simulator.h"

namespace synloco {

// High-level velocity command in the body frame.
struct Command {
  double vx = 0.0;  // m/s
  double vy = 0.0;  // m/s
  double wz = 0.0;  // rad/s
};

inline constexpr int kObservationSize = 61;
using Observation = Eigen::Matrix<double, kObservationSize, 1>;

// Slot offsets inside the observation vector.
inline constexpr int kObsCommand = 0;
inline constexpr int kObsAngularVelocity = 3;
inline constexpr int kObsGravity = 6;
inline constexpr int kObsJointPosition = 9;
inline constexpr int kObsJointVelocity = 21;
inline constexpr int kObsContacts = 33;
inline constexpr int kObsLastAction = 37;
inline constexpr int kObsPlannerSignal = 49;

struct ObservationScales {
  double linear_command = 2.0;
  double angular = 0.25;  // angular command and trunk angular velocity
  double joint_velocity = 0.05;
};

// Joint positions and the planner signal are written as offsets from
// `nominal`.
Observation BuildObservation(const RobotState& state, const Command& cmd,
                             const JointVector& planner_signal,
                             const JointVector& last_action,
                             const JointVector& nominal,
                             const ObservationScales& scales = {});

// q_cpg + clamp(residual, +-limit).
JointVector ComposeAction(const JointVector& q_cpg, const JointVector& residual,
                          double limit);

enum RewardTerm {
  kLinearVelocityTracking,
  kAngularVelocityTracking,
  kLinearVelocityPenalty,
  kAngularVelocityPenalty,
  kTrunkOrientation,
  kTrunkHeight,
  kJointAcceleration,
  kActionRate,
  kSelfCollision,
  kFootAirTime,
  kFootPosition,
  kNumRewardTerms
};
std::string_view RewardTermName(int term);

struct RewardWeights {
  // Per-second weights; the reward multiplies them by the step length.
  std::array<double, kNumRewardTerms> weight = {
      1.0, 0.5, -2.0, -0.05, -5.0, -1.0, -1e-7, -0.005, -0.001, 1.5, 0.3};
  double tracking_sigma = 0.25;
  double height_sigma = 8.1e-4;
  double foot_position_sigma = 0.02;
  double air_time_target = 0.5;  // s
  double target_height = 0.32;   // m
  double collision_distance = 0.04;
};

struct RewardBreakdown {
  std::array<double, kNumRewardTerms> raw{};       // unweighted expression
  std::array<double, kNumRewardTerms> weighted{};  // weight * dt * raw
  double total = 0.0;
};

struct RewardInputs {
  const RobotState* prev = nullptr;
  const RobotState* cur = nullptr;
  Command cmd;
  JointVector action = JointVector::Zero();
  JointVector prev_action = JointVector::Zero();
  // Body-frame foot targets: forward kinematics of the planner signal.
  std::array<Eigen::Vector3d, kNumLegs> desired_feet{};
  // Air time of every touchdown that happened during the step.
  std::span<const double> touchdown_air_times;
  double dt = 0.02;
};

RewardBreakdown ComputeReward(const RewardInputs& in,
                              const RobotGeometry& robot,
                              const RewardWeights& weights = {});

}  // namespace synloco

#endif  // SYNLOCO_TASK_H_
