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

#include "synloco/simulator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "synloco/errors.h"

namespace synloco {

Eigen::Vector3d Terrain::Normal() const {
  if (kind == Kind::kFlat) return Eigen::Vector3d::UnitZ();
  return {-std::sin(angle), 0.0, std::cos(angle)};
}

double Terrain::Distance(const Eigen::Vector3d& p) const {
  if (kind == Kind::kFlat) return p.z();
  return Normal().dot(p);
}

void ValidateEnvParams(const EnvParams& params) {
  if (!(params.trunk_mass > 0.0)) throw InvalidParams("trunk mass must be > 0");
  if (!(params.trunk_inertia.minCoeff() > 0.0)) {
    throw InvalidParams("trunk inertia must be positive");
  }
  if (!(params.friction >= 0.0)) throw InvalidParams("friction must be >= 0");
  if (!(params.contact_stiffness > 0.0 && params.contact_damping > 0.0 &&
        params.tangential_gain > 0.0)) {
    throw InvalidParams("contact stiffness, damping and tangential gain "
                        "must be > 0");
  }
  if (!(params.gravity >= 0.0)) throw InvalidParams("gravity must be >= 0");
}

std::string_view TerminationName(Termination t) {
  switch (t) {
    case Termination::kRunning:
      return "running";
    case Termination::kTimeout:
      return "timeout";
    case Termination::kTrunkCollision:
      return "trunk_collision";
  }
  return "unknown";
}

JointVector LowPass(const JointVector& q_t, const JointVector& s_prev,
                    double alpha) {
  return alpha * q_t + (1.0 - alpha) * s_prev;
}

JointVector PdTorque(const JointVector& q_star, const JointVector& q,
                     const JointVector& qdot, double kp, double kd,
                     double tau_limit) {
  const JointVector raw = kp * (q_star - q) - kd * qdot;
  return raw.cwiseMax(-tau_limit).cwiseMin(tau_limit);
}

Eigen::Vector3d ContactForce(const Eigen::Vector3d& foot_pos,
                             const Eigen::Vector3d& foot_vel,
                             const Terrain& terrain, const EnvParams& params) {
  const double depth = -terrain.Distance(foot_pos);
  if (depth <= 0.0) return Eigen::Vector3d::Zero();
  const Eigen::Vector3d n = terrain.Normal();
  const double normal_speed = n.dot(foot_vel);
  const double normal = std::max(
      0.0, params.contact_stiffness * depth - params.contact_damping * normal_speed);
  const Eigen::Vector3d tangential_vel = foot_vel - normal_speed * n;
  const double speed = tangential_vel.norm();
  Eigen::Vector3d force = normal * n;
  if (speed > 0.0) {
    const double magnitude =
        std::min(params.friction * normal, params.tangential_gain * speed);
    force -= magnitude / speed * tangential_vel;
  }
  return force;
}

namespace {

constexpr int kDof = 6 + kNumJoints;
using DofVector = Eigen::Matrix<double, kDof, 1>;
using DofMatrix = Eigen::Matrix<double, kDof, kDof>;
using FootJacobian = Eigen::Matrix<double, 3, kDof>;

enum class ContactMode { kSeparate, kStick, kSlide };

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

RobotState StepPhysics(const RobotState& state, const JointVector& targets,
                       const EnvParams& env, const SimConfig& config) {
  const double dt = config.dt;
  const TrunkState& trunk = state.trunk;
  const Eigen::Matrix3d rot = trunk.orientation.toRotationMatrix();
  const Eigen::Vector3d n = env.terrain.Normal();
  const Eigen::Matrix3d normal_proj = n * n.transpose();
  const Eigen::Matrix3d tangent_proj = Eigen::Matrix3d::Identity() - normal_proj;
  const Eigen::Vector3d& w = trunk.angular_velocity;
  const Eigen::Vector3d& inertia = env.trunk_inertia;

  // Generalized velocity: world linear velocity, body angular velocity,
  // joint rates. The mass matrix is diagonal (massless legs, rotor inertia).
  DofVector u;
  u << trunk.linear_velocity, w, state.qdot;
  DofVector mass;
  mass << Eigen::Vector3d::Constant(env.trunk_mass), inertia,
      JointVector::Constant(config.reflected_inertia);
  DofVector applied;
  applied << Eigen::Vector3d(0.0, 0.0, -env.gravity * env.trunk_mass),
      Eigen::Vector3d::Zero(),
      PdTorque(targets, state.q, state.qdot, config.kp, config.kd,
               config.torque_limit);

  // Gyroscopic term w x Iw linearized about w and integrated implicitly;
  // the explicit form blows up once the trunk spins quickly in flight.
  const Eigen::Vector3d iw = inertia.cwiseProduct(w);
  const Eigen::Vector3d gyro = w.cross(iw);
  const Eigen::Matrix3d gyro_jac =
      Skew(w) * inertia.asDiagonal().toDenseMatrix() - Skew(iw);

  std::array<FootJacobian, kNumLegs> foot_jac;
  std::array<Eigen::Vector3d, kNumLegs> foot_pos;
  std::array<double, kNumLegs> depth{};
  std::array<ContactMode, kNumLegs> mode{};
  std::array<Eigen::Vector3d, kNumLegs> slide_force{};
  for (Leg leg : kAllLegs) {
    const int l = LegIndex(leg);
    const LegGeometry geom = config.robot.ForLeg(leg);
    const LegAngles q = LegSegment(state.q, leg);
    const Eigen::Vector3d r = ForwardKinematics(q, geom);
    foot_jac[l].setZero();
    foot_jac[l].leftCols<3>().setIdentity();
    foot_jac[l].middleCols<3>(3) = -rot * Skew(r);
    foot_jac[l].middleCols<3>(6 + kJointsPerLeg * l) = rot * LegJacobian(q, geom);
    foot_pos[l] = trunk.position + rot * r;
    depth[l] = -env.terrain.Distance(foot_pos[l]);
    mode[l] = depth[l] > 0.0 ? ContactMode::kStick : ContactMode::kSeparate;
  }

  // Velocity predictor with the contact spring and damping integrated
  // implicitly. Feet that would pull on the ground are released and feet
  // that exceed the friction cone switch to an explicit sliding force.
  const double normal_gain =
      env.contact_damping + env.contact_stiffness * dt;
  DofVector predicted = u;
  for (int pass = 0; pass < 2 * kNumLegs + 1; ++pass) {
    DofMatrix lhs = (mass / dt).asDiagonal();
    lhs.block<3, 3>(3, 3) += gyro_jac;
    DofVector rhs = (mass / dt).cwiseProduct(u) + applied;
    rhs.segment<3>(3) += gyro;
    bool any_contact = false;
    for (int l = 0; l < kNumLegs; ++l) {
      if (mode[l] == ContactMode::kSeparate) continue;
      any_contact = true;
      Eigen::Matrix3d damping = normal_gain * normal_proj;
      Eigen::Vector3d force = env.contact_stiffness * depth[l] * n;
      if (mode[l] == ContactMode::kStick) {
        damping += env.tangential_gain * tangent_proj;
      } else {
        force += slide_force[l];
      }
      lhs += foot_jac[l].transpose() * damping * foot_jac[l];
      rhs += foot_jac[l].transpose() * force;
    }
    predicted = lhs.partialPivLu().solve(rhs);
    if (!any_contact) break;

    bool changed = false;
    for (int l = 0; l < kNumLegs; ++l) {
      if (mode[l] == ContactMode::kSeparate) continue;
      const Eigen::Vector3d v = foot_jac[l] * predicted;
      const double normal =
          env.contact_stiffness * depth[l] - normal_gain * n.dot(v);
      if (normal <= 0.0) {
        mode[l] = ContactMode::kSeparate;
        changed = true;
        continue;
      }
      if (mode[l] == ContactMode::kStick) {
        const Eigen::Vector3d vt = tangent_proj * v;
        if (env.tangential_gain * vt.norm() > env.friction * normal) {
          mode[l] = ContactMode::kSlide;
          slide_force[l] = -env.friction * normal * vt.normalized();
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  // Contact law evaluated at the predicted foot state; the dynamics then use
  // exactly these forces.
  RobotState next = state;
  DofVector generalized = applied;
  for (int l = 0; l < kNumLegs; ++l) {
    Eigen::Vector3d force = Eigen::Vector3d::Zero();
    if (depth[l] > 0.0) {
      const Eigen::Vector3d v = foot_jac[l] * predicted;
      force = ContactForce(foot_pos[l] + dt * v, v, env.terrain, env);
    }
    next.contact_forces[l] = force;
    generalized += foot_jac[l].transpose() * force;

    next.touchdown[l] = false;
    next.touchdown_air_time[l] = 0.0;
    const bool in_contact = depth[l] > 0.0;
    if (in_contact) {
      if (!state.contacts[l]) {
        next.touchdown[l] = true;
        next.touchdown_air_time[l] = state.air_time[l];
      }
      next.air_time[l] = 0.0;
    } else {
      next.air_time[l] = state.air_time[l] + dt;
    }
    next.contacts[l] = in_contact;
  }
  DofVector u_next = u + dt * generalized.cwiseQuotient(mass);
  const Eigen::Matrix3d angular_lhs =
      inertia.asDiagonal().toDenseMatrix() / dt + gyro_jac;
  u_next.segment<3>(3) = angular_lhs.partialPivLu().solve(
      iw / dt + generalized.segment<3>(3) + gyro);

  TrunkState& out = next.trunk;
  out.linear_velocity = u_next.head<3>();
  out.angular_velocity = u_next.segment<3>(3);
  next.qdot = u_next.tail<kNumJoints>();
  out.position = trunk.position + dt * out.linear_velocity;
  const double angle = out.angular_velocity.norm() * dt;
  if (angle > 0.0) {
    out.orientation =
        trunk.orientation *
        Eigen::Quaterniond(
            Eigen::AngleAxisd(angle, out.angular_velocity.normalized()));
  }
  out.orientation.normalize();

  next.q = state.q + dt * next.qdot;
  for (int j = 0; j < kNumJoints; ++j) {
    const int k = j % kJointsPerLeg;
    const double lo = config.robot.limits.lower[k];
    const double hi = config.robot.limits.upper[k];
    if (next.q[j] < lo) {
      next.q[j] = lo;
      next.qdot[j] = std::max(0.0, next.qdot[j]);
    } else if (next.q[j] > hi) {
      next.q[j] = hi;
      next.qdot[j] = std::min(0.0, next.qdot[j]);
    }
  }
  next.episode_time = state.episode_time + dt;

  const double limit = config.divergence_limit;
  const bool finite = out.position.allFinite() &&
                      out.linear_velocity.allFinite() &&
                      out.angular_velocity.allFinite() && next.q.allFinite() &&
                      next.qdot.allFinite();
  if (!finite || out.position.cwiseAbs().maxCoeff() > limit ||
      out.linear_velocity.cwiseAbs().maxCoeff() > limit ||
      out.angular_velocity.cwiseAbs().maxCoeff() > limit ||
      next.qdot.cwiseAbs().maxCoeff() > limit) {
    throw NumericalDivergence("simulation state diverged at t=" +
                              std::to_string(next.episode_time));
  }
  return next;
}

RobotState ApplyImpulse(const RobotState& state, const Eigen::Vector2d& delta_v,
                        double cap) {
  if (delta_v.cwiseAbs().maxCoeff() > cap) {
    throw InvalidParams("impulse component exceeds the cap of " +
                        std::to_string(cap) + " m/s");
  }
  RobotState next = state;
  next.trunk.linear_velocity.head<2>() += delta_v;
  return next;
}

Termination CheckTermination(const RobotState& state, const Terrain& terrain,
                             const SimConfig& config) {
  const Eigen::Matrix3d rot = state.trunk.orientation.toRotationMatrix();
  const Eigen::Vector3d& half = config.trunk_half_extents;
  double lowest = std::numeric_limits<double>::infinity();
  for (int corner = 0; corner < 8; ++corner) {
    const Eigen::Vector3d local((corner & 1) ? half.x() : -half.x(),
                                (corner & 2) ? half.y() : -half.y(),
                                (corner & 4) ? half.z() : -half.z());
    lowest = std::min(lowest,
                      terrain.Distance(state.trunk.position + rot * local));
  }
  if (lowest < config.collision_margin) return Termination::kTrunkCollision;
  if (state.episode_time >= config.max_episode_time - 1e-9) {
    return Termination::kTimeout;
  }
  return Termination::kRunning;
}

RobotState StandingState(const SimConfig& config, double stand_height,
                         double height) {
  RobotState state;
  state.q = NominalJointAngles(config.robot, stand_height);
  state.filter_mem = state.q;
  state.trunk.position = {0.0, 0.0, height};
  return state;
}

std::array<Eigen::Vector3d, kNumLegs> FootPositionsBody(
    const JointVector& q, const RobotGeometry& robot) {
  std::array<Eigen::Vector3d, kNumLegs> feet;
  for (Leg leg : kAllLegs) {
    feet[LegIndex(leg)] = ForwardKinematics(LegSegment(q, leg), robot.ForLeg(leg));
  }
  return feet;
}

std::array<Eigen::Vector3d, kNumLegs> FootPositionsWorld(
    const RobotState& state, const RobotGeometry& robot) {
  auto feet = FootPositionsBody(state.q, robot);
  for (auto& p : feet) p = state.trunk.position + state.trunk.orientation * p;
  return feet;
}

int CountFootCollisions(const std::array<Eigen::Vector3d, kNumLegs>& feet,
                        double distance) {
  int count = 0;
  for (int a = 0; a < kNumLegs; ++a) {
    for (int b = a + 1; b < kNumLegs; ++b) {
      if ((feet[a] - feet[b]).norm() < distance) ++count;
    }
  }
  return count;
}

Eigen::Vector3d BodyLinearVelocity(const TrunkState& trunk) {
  return trunk.orientation.conjugate() * trunk.linear_velocity;
}

Eigen::Vector3d ProjectedGravity(const TrunkState& trunk) {
  return trunk.orientation.conjugate() * Eigen::Vector3d(0.0, 0.0, -1.0);
}

Eigen::Vector3d RollPitchYaw(const TrunkState& trunk) {
  const Eigen::Matrix3d r = trunk.orientation.toRotationMatrix();
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

}  // namespace synloco
