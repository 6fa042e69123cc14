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

#include "synloco/task.h"

#include <cmath>

#include "synloco/errors.h"

namespace synloco {

Observation BuildObservation(const RobotState& state, const Command& cmd,
                             const JointVector& planner_signal,
                             const JointVector& last_action,
                             const JointVector& nominal,
                             const ObservationScales& scales) {
  Observation obs;
  obs.segment<3>(kObsCommand) << scales.linear_command * cmd.vx,
      scales.linear_command * cmd.vy, scales.angular * cmd.wz;
  obs.segment<3>(kObsAngularVelocity) =
      scales.angular * state.trunk.angular_velocity;
  obs.segment<3>(kObsGravity) = ProjectedGravity(state.trunk);
  obs.segment<kNumJoints>(kObsJointPosition) = state.q - nominal;
  obs.segment<kNumJoints>(kObsJointVelocity) =
      scales.joint_velocity * state.qdot;
  for (int l = 0; l < kNumLegs; ++l) {
    obs[kObsContacts + l] = state.contacts[l] ? 1.0 : 0.0;
  }
  obs.segment<kNumJoints>(kObsLastAction) = last_action;
  obs.segment<kNumJoints>(kObsPlannerSignal) = planner_signal - nominal;
  return obs;
}

JointVector ComposeAction(const JointVector& q_cpg, const JointVector& residual,
                          double limit) {
  return q_cpg + residual.cwiseMax(-limit).cwiseMin(limit);
}

std::string_view RewardTermName(int term) {
  static constexpr std::array<std::string_view, kNumRewardTerms> kNames = {
      "lin_vel_tracking", "ang_vel_tracking", "lin_vel_z",
      "ang_vel_xy",       "orientation",      "height",
      "joint_accel",      "action_rate",      "collision",
      "feet_air_time",    "foot_position"};
  if (term < 0 || term >= kNumRewardTerms) return "unknown";
  return kNames[term];
}

RewardBreakdown ComputeReward(const RewardInputs& in,
                              const RobotGeometry& robot,
                              const RewardWeights& weights) {
  if (!(in.dt > 0.0)) throw InvalidParams("reward step must be > 0");
  if (in.prev == nullptr || in.cur == nullptr) {
    throw InvalidParams("reward needs both the previous and current state");
  }
  const RobotState& cur = *in.cur;
  const Eigen::Vector3d v = BodyLinearVelocity(cur.trunk);
  const Eigen::Vector3d& w = cur.trunk.angular_velocity;
  const Eigen::Vector3d g = ProjectedGravity(cur.trunk);

  RewardBreakdown out;
  auto& r = out.raw;
  const double dvx = in.cmd.vx - v.x();
  const double dvy = in.cmd.vy - v.y();
  r[kLinearVelocityTracking] =
      std::exp(-(dvx * dvx + dvy * dvy) / weights.tracking_sigma);
  const double dwz = in.cmd.wz - w.z();
  r[kAngularVelocityTracking] = std::exp(-dwz * dwz / weights.tracking_sigma);
  r[kLinearVelocityPenalty] = v.z() * v.z();
  r[kAngularVelocityPenalty] = w.x() * w.x() + w.y() * w.y();
  r[kTrunkOrientation] = g.x() * g.x() + g.y() * g.y();
  const double dh = cur.trunk.position.z() - weights.target_height;
  r[kTrunkHeight] = 1.0 - std::exp(-dh * dh / weights.height_sigma);
  r[kJointAcceleration] =
      ((in.prev->qdot - cur.qdot) / in.dt).squaredNorm();
  r[kActionRate] = (in.prev_action - in.action).squaredNorm();
  const auto feet = FootPositionsBody(cur.q, robot);
  r[kSelfCollision] = CountFootCollisions(feet, weights.collision_distance);
  double air = 0.0;
  for (double t : in.touchdown_air_times) air += t - weights.air_time_target;
  r[kFootAirTime] = air;
  double foot = 0.0;
  for (int l = 0; l < kNumLegs; ++l) {
    foot += std::exp(-(feet[l] - in.desired_feet[l]).squaredNorm() /
                     weights.foot_position_sigma);
  }
  r[kFootPosition] = foot;

  for (int k = 0; k < kNumRewardTerms; ++k) {
    out.weighted[k] = weights.weight[k] * in.dt * r[k];
    out.total += out.weighted[k];
  }
  return out;
}

}  // namespace synloco
