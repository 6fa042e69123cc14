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

#ifndef SYNLOCO_KINEMATICS_H_
#define SYNLOCO_KINEMATICS_H_

#include <array>
#include <string_view>

#include <Eigen/Core>

namespace synloco {

inline constexpr int kNumLegs = 4;
inline constexpr int kJointsPerLeg = 3;
inline constexpr int kNumJoints = kNumLegs * kJointsPerLeg;

using LegAngles = Eigen::Vector3d;  // (abduction, hip, knee) in rad
using JointVector = Eigen::Matrix<double, kNumJoints, 1>;

// Leg order used everywhere: front right, front left, rear right, rear left.
enum class Leg { kFR = 0, kFL = 1, kRR = 2, kRL = 3 };
inline constexpr std::array<Leg, kNumLegs> kAllLegs = {Leg::kFR, Leg::kFL,
                                                       Leg::kRR, Leg::kRL};

std::string_view LegName(Leg leg);
// Returns false if `name` is not one of FR, FL, RR, RL.
bool ParseLegName(std::string_view name, Leg* leg);
inline int LegIndex(Leg leg) { return static_cast<int>(leg); }
inline bool IsFront(Leg leg) { return leg == Leg::kFR || leg == Leg::kFL; }
// +1 for left legs, -1 for right legs.
inline double SideSign(Leg leg) {
  return (leg == Leg::kFL || leg == Leg::kRL) ? 1.0 : -1.0;
}

// Geometry of a single 3-DOF leg. With all angles zero the leg hangs
// straight down; negative knee angles bend the knee backward.
struct LegGeometry {
  double hip_offset = 0.08;
  double thigh_length = 0.213;
  double calf_length = 0.213;
  Eigen::Vector3d hip_mount = Eigen::Vector3d::Zero();
  double side_sign = -1.0;

  double MaxReach() const { return thigh_length + calf_length; }
};

struct JointLimits {
  Eigen::Vector3d lower{-0.8, -1.2, -2.7};
  Eigen::Vector3d upper{0.8, 2.5, 0.0};
};

// Go1-like quadruped dimensions shared by all four legs.
struct RobotGeometry {
  double hip_offset = 0.08;
  double thigh_length = 0.213;
  double calf_length = 0.213;
  double hip_mount_x = 0.1881;
  double hip_mount_y = 0.04675;
  JointLimits limits;

  LegGeometry ForLeg(Leg leg) const;
};

// Foot position in the body frame.
Eigen::Vector3d ForwardKinematics(const LegAngles& q, const LegGeometry& geom);

// d(foot position)/dq, columns ordered (abduction, hip, knee).
Eigen::Matrix3d LegJacobian(const LegAngles& q, const LegGeometry& geom);

// Closed-form inverse on the knee-backward branch (knee <= 0). Throws
// IkUnreachable when `foot` is outside the leg workspace.
LegAngles InverseKinematics(const Eigen::Vector3d& foot,
                            const LegGeometry& geom);

// Foot placement of the standing pose: directly below the hip, displaced
// laterally by the hip offset, `stand_height` below the body origin.
Eigen::Vector3d StandingFootPosition(const RobotGeometry& robot, Leg leg,
                                     double stand_height);
// Joint angles of the standing pose for all legs.
JointVector NominalJointAngles(const RobotGeometry& robot,
                               double stand_height);

inline LegAngles LegSegment(const JointVector& q, Leg leg) {
  return q.segment<kJointsPerLeg>(kJointsPerLeg * LegIndex(leg));
}

}  // namespace synloco

#endif  // SYNLOCO_KINEMATICS_H_
