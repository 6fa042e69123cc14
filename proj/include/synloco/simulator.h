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

#ifndef SYNLOCO_SIMULATOR_H_
#define SYNLOCO_SIMULATOR_H_

#include <array>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "synloco/kinematics.h"

namespace synloco {

struct Terrain {
  enum class Kind { kFlat, kSlope };
  Kind kind = Kind::kFlat;
  double angle = 0.0;  // rad, ground rises along +x for positive angles

  // Unit normal of the ground plane, which passes through the origin.
  Eigen::Vector3d Normal() const;
  // Signed distance of `p` above the ground along the normal.
  double Distance(const Eigen::Vector3d& p) const;
};

// Per-episode physical parameters.
struct EnvParams {
  double trunk_mass = 12.0;
  Eigen::Vector3d trunk_inertia{0.046, 0.154, 0.18};
  double friction = 1.0;
  double contact_stiffness = 3e4;  // N/m
  double contact_damping = 300.0;  // N s/m
  double tangential_gain = 1e3;    // N s/m
  double gravity = 9.81;
  Terrain terrain;
};

void ValidateEnvParams(const EnvParams& params);

// Fixed properties of the simulated robot and integrator.
struct SimConfig {
  RobotGeometry robot;
  double dt = 1.0 / 200.0;
  double kp = 75.0;
  double kd = 1.5;
  double torque_limit = 23.7;
  double reflected_inertia = 0.05;  // kg m^2 per joint
  Eigen::Vector3d trunk_half_extents{0.19, 0.095, 0.05};
  double collision_margin = 0.05;
  double max_episode_time = 20.0;
  double divergence_limit = 1e6;
  double foot_collision_distance = 0.04;
};

struct TrunkState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero();   // world
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();  // body
};

struct RobotState {
  TrunkState trunk;
  JointVector q = JointVector::Zero();
  JointVector qdot = JointVector::Zero();
  std::array<bool, kNumLegs> contacts{};
  JointVector filter_mem = JointVector::Zero();
  std::array<double, kNumLegs> air_time{};
  double episode_time = 0.0;
  // Ground reaction on each foot during the last step, world frame.
  std::array<Eigen::Vector3d, kNumLegs> contact_forces{};
  // Feet that touched down during the last step and their air time.
  std::array<bool, kNumLegs> touchdown{};
  std::array<double, kNumLegs> touchdown_air_time{};
};

enum class Termination { kRunning, kTimeout, kTrunkCollision };
std::string_view TerminationName(Termination t);

// s_t = alpha * q_t + (1 - alpha) * s_prev.
JointVector LowPass(const JointVector& q_t, const JointVector& s_prev,
                    double alpha);

// clamp(kp * (q_star - q) - kd * qdot, +-tau_limit).
JointVector PdTorque(const JointVector& q_star, const JointVector& q,
                     const JointVector& qdot, double kp, double kd,
                     double tau_limit);

// Spring-damper normal force with regularized Coulomb friction. Zero when
// the foot is above the ground.
Eigen::Vector3d ContactForce(const Eigen::Vector3d& foot_pos,
                             const Eigen::Vector3d& foot_vel,
                             const Terrain& terrain, const EnvParams& params);

// Advances the robot by config.dt. A velocity predictor treats the contact
// springs, dampers and the gyroscopic term implicitly over trunk and joint
// coordinates together (with an active set for lift-off and sliding); the
// contact law is then evaluated at the predicted foot state and the update
// itself is semi-implicit Euler. Throws NumericalDivergence when any state
// magnitude exceeds config.divergence_limit.
RobotState StepPhysics(const RobotState& state, const JointVector& targets,
                       const EnvParams& env, const SimConfig& config);

// Adds delta_v to the trunk's horizontal velocity. Throws InvalidParams if a
// component exceeds `cap`.
RobotState ApplyImpulse(const RobotState& state, const Eigen::Vector2d& delta_v,
                        double cap);

Termination CheckTermination(const RobotState& state, const Terrain& terrain,
                             const SimConfig& config);

// Standing pose with the trunk `height` above the ground and zero velocity.
RobotState StandingState(const SimConfig& config, double stand_height,
                         double height);

std::array<Eigen::Vector3d, kNumLegs> FootPositionsBody(
    const JointVector& q, const RobotGeometry& robot);
std::array<Eigen::Vector3d, kNumLegs> FootPositionsWorld(
    const RobotState& state, const RobotGeometry& robot);

// Number of foot pairs closer than config.foot_collision_distance.
int CountFootCollisions(const std::array<Eigen::Vector3d, kNumLegs>& feet,
                        double distance);

Eigen::Vector3d BodyLinearVelocity(const TrunkState& trunk);
// Unit gravity direction expressed in the body frame.
Eigen::Vector3d ProjectedGravity(const TrunkState& trunk);
// (roll, pitch, yaw) in rad, ZYX convention.
Eigen::Vector3d RollPitchYaw(const TrunkState& trunk);

}  // namespace synloco

#endif  // SYNLOCO_SIMULATOR_H_
