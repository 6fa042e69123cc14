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

#include "synloco/kinematics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "synloco/errors.h"

namespace synloco {
namespace {

// Reach tolerance so that points produced by FK at full extension are
// accepted despite rounding.
constexpr double kReachTolerance = 1e-12;

std::string FormatPoint(const Eigen::Vector3d& p) {
  std::ostringstream out;
  out.precision(6);
  out << "(" << p.x() << ", " << p.y() << ", " << p.z() << ")";
  return out.str();
}

}  // namespace

std::string_view LegName(Leg leg) {
  switch (leg) {
    case Leg::kFR:
      return "FR";
    case Leg::kFL:
      return "FL";
    case Leg::kRR:
      return "RR";
    case Leg::kRL:
      return "RL";
  }
  return "??";
}

bool ParseLegName(std::string_view name, Leg* leg) {
  for (Leg candidate : kAllLegs) {
    if (LegName(candidate) == name) {
      *leg = candidate;
      return true;
    }
  }
  return false;
}

LegGeometry RobotGeometry::ForLeg(Leg leg) const {
  LegGeometry geom;
  geom.hip_offset = hip_offset;
  geom.thigh_length = thigh_length;
  geom.calf_length = calf_length;
  geom.side_sign = SideSign(leg);
  geom.hip_mount = {IsFront(leg) ? hip_mount_x : -hip_mount_x,
                    geom.side_sign * hip_mount_y, 0.0};
  return geom;
}

Eigen::Vector3d ForwardKinematics(const LegAngles& q, const LegGeometry& geom) {
  const double l1 = geom.thigh_length;
  const double l2 = geom.calf_length;
  const double x = -l1 * std::sin(q[1]) - l2 * std::sin(q[1] + q[2]);
  const double z = -l1 * std::cos(q[1]) - l2 * std::cos(q[1] + q[2]);
  const double y = geom.side_sign * geom.hip_offset;
  const double c = std::cos(q[0]);
  const double s = std::sin(q[0]);
  return geom.hip_mount + Eigen::Vector3d(x, c * y - s * z, s * y + c * z);
}

Eigen::Matrix3d LegJacobian(const LegAngles& q, const LegGeometry& geom) {
  const double l1 = geom.thigh_length;
  const double l2 = geom.calf_length;
  const double s1 = std::sin(q[1]);
  const double c1 = std::cos(q[1]);
  const double s12 = std::sin(q[1] + q[2]);
  const double c12 = std::cos(q[1] + q[2]);
  const double z = -l1 * c1 - l2 * c12;
  const double y = geom.side_sign * geom.hip_offset;
  const double c = std::cos(q[0]);
  const double s = std::sin(q[0]);

  const double dx_dhip = -l1 * c1 - l2 * c12;
  const double dx_dknee = -l2 * c12;
  const double dz_dhip = l1 * s1 + l2 * s12;
  const double dz_dknee = l2 * s12;

  Eigen::Matrix3d jac;
  jac << 0.0, dx_dhip, dx_dknee,
         -s * y - c * z, -s * dz_dhip, -s * dz_dknee,
         c * y - s * z, c * dz_dhip, c * dz_dknee;
  return jac;
}

LegAngles InverseKinematics(const Eigen::Vector3d& foot,
                            const LegGeometry& geom) {
  const Eigen::Vector3d p = foot - geom.hip_mount;
  const double l1 = geom.thigh_length;
  const double l2 = geom.calf_length;
  const double h = geom.hip_offset;

  const double radial_sq = p.y() * p.y() + p.z() * p.z() - h * h;
  if (!(radial_sq >= 0.0)) {
    throw IkUnreachable("foot " + FormatPoint(foot) +
                        " lies inside the hip offset cylinder");
  }
  const double sagittal_z = -std::sqrt(radial_sq);
  const double reach = std::hypot(p.x(), sagittal_z);
  if (reach > l1 + l2 + kReachTolerance ||
      reach < std::abs(l1 - l2) - kReachTolerance) {
    throw IkUnreachable("foot " + FormatPoint(foot) + " at planar reach " +
                        std::to_string(reach) + " m is outside [" +
                        std::to_string(std::abs(l1 - l2)) + ", " +
                        std::to_string(l1 + l2) + "]");
  }

  double abduction = std::atan2(p.z(), p.y()) -
                     std::atan2(sagittal_z, geom.side_sign * h);
  abduction = std::remainder(abduction, 2.0 * M_PI);

  const double cos_knee = std::clamp(
      (reach * reach - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double knee = -std::acos(cos_knee);
  const double hip = std::atan2(-p.x(), -sagittal_z) -
                     std::atan2(l2 * std::sin(knee), l1 + l2 * std::cos(knee));
  return {abduction, hip, knee};
}

Eigen::Vector3d StandingFootPosition(const RobotGeometry& robot, Leg leg,
                                     double stand_height) {
  const LegGeometry geom = robot.ForLeg(leg);
  return geom.hip_mount +
         Eigen::Vector3d(0.0, geom.side_sign * geom.hip_offset, -stand_height);
}

JointVector NominalJointAngles(const RobotGeometry& robot,
                               double stand_height) {
  JointVector q;
  for (Leg leg : kAllLegs) {
    q.segment<kJointsPerLeg>(kJointsPerLeg * LegIndex(leg)) =
        InverseKinematics(StandingFootPosition(robot, leg, stand_height),
                          robot.ForLeg(leg));
  }
  return q;
}

}  // namespace synloco
