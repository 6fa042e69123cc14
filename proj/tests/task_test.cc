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
#include <random>
#include <vector>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "synloco/errors.h"

namespace synloco {
namespace {

constexpr double kDt = 0.02;

RobotState Standing() {
  SimConfig cfg;
  return StandingState(cfg, 0.32, 0.32);
}

TEST(ObservationTest, Scaling) {
  RobotState s = Standing();
  s.trunk.angular_velocity = {0.0, 0.0, 0.8};
  s.qdot(3) = 2.0;
  const JointVector nominal = s.q;
  const Observation obs = BuildObservation(s, {0.5, -0.25, 0.4}, nominal,
                                           JointVector::Zero(), nominal);
  EXPECT_EQ(obs.size(), 61);
  EXPECT_DOUBLE_EQ(obs[kObsCommand], 1.0);
  EXPECT_DOUBLE_EQ(obs[kObsCommand + 1], -0.5);
  EXPECT_DOUBLE_EQ(obs[kObsCommand + 2], 0.1);
  EXPECT_DOUBLE_EQ(obs[kObsAngularVelocity + 2], 0.2);
  EXPECT_DOUBLE_EQ(obs[kObsJointVelocity + 3], 0.1);
}

TEST(ObservationTest, Layout) {
  RobotState s = Standing();
  s.trunk.orientation =
      Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitX()));
  s.contacts = {true, false, false, true};
  const JointVector nominal = s.q;
  s.q(5) += 0.2;
  JointVector action, planner;
  for (int j = 0; j < kNumJoints; ++j) {
    action(j) = 0.01 * j;
    planner(j) = nominal(j) + 0.02 * j;
  }
  const Observation obs = BuildObservation(s, {}, planner, action, nominal);
  EXPECT_NEAR(obs.segment<3>(kObsGravity).norm(), 1.0, 1e-12);
  EXPECT_NEAR(obs[kObsGravity + 1], -std::sin(0.3), 1e-15);
  EXPECT_NEAR(obs[kObsJointPosition + 5], 0.2, 1e-15);
  EXPECT_EQ(obs[kObsJointPosition + 4], 0.0);
  EXPECT_EQ(obs[kObsContacts], 1.0);
  EXPECT_EQ(obs[kObsContacts + 1], 0.0);
  EXPECT_EQ(obs[kObsContacts + 3], 1.0);
  EXPECT_EQ(obs.segment<kNumJoints>(kObsLastAction), action);
  for (int j = 0; j < kNumJoints; ++j) {
    EXPECT_NEAR(obs[kObsPlannerSignal + j], 0.02 * j, 1e-15);
  }
}

TEST(ObservationTest, Pure) {
  RobotState s = Standing();
  s.trunk.angular_velocity = {0.1, 0.2, 0.3};
  const JointVector a = JointVector::Constant(0.1);
  const Observation x = BuildObservation(s, {0.3, 0, 0}, s.q, a, s.q);
  const Observation y = BuildObservation(s, {0.3, 0, 0}, s.q, a, s.q);
  EXPECT_EQ(x, y);
}

TEST(ComposeActionTest, Examples) {
  const JointVector cpg = JointVector::Constant(0.3);
  EXPECT_NEAR(ComposeAction(cpg, JointVector::Constant(0.1), 0.6)(0), 0.4,
              1e-15);
  EXPECT_EQ(ComposeAction(cpg, JointVector::Zero(), 0.6), cpg);
  EXPECT_EQ(ComposeAction(cpg, JointVector::Constant(1.5), 0.6)(0), 0.3 + 0.6);
  EXPECT_EQ(ComposeAction(cpg, JointVector::Constant(-1.5), 0.6)(0),
            0.3 - 0.6);
}

class RewardTest : public ::testing::Test {
 protected:
  RewardInputs Inputs() {
    RewardInputs in;
    in.prev = &prev_;
    in.cur = &cur_;
    in.dt = kDt;
    in.desired_feet = FootPositionsBody(cur_.q, robot_);
    return in;
  }

  RobotGeometry robot_;
  RobotState prev_ = Standing();
  RobotState cur_ = Standing();
};

TEST_F(RewardTest, PerfectTracking) {
  cur_.trunk.linear_velocity = {0.4, -0.2, 0.0};
  cur_.trunk.angular_velocity = {0.0, 0.0, 0.7};
  RewardInputs in = Inputs();
  in.cmd = {0.4, -0.2, 0.7};
  const RewardBreakdown r = ComputeReward(in, robot_);
  EXPECT_DOUBLE_EQ(
      r.weighted[kLinearVelocityTracking] + r.weighted[kAngularVelocityTracking],
      0.03);
}

TEST_F(RewardTest, TrackingErrorOfHalf) {
  cur_.trunk.linear_velocity = {0.3, 0.4, 0.0};
  RewardInputs in = Inputs();
  in.cmd = {0.0, 0.0, 0.0};
  EXPECT_NEAR(ComputeReward(in, robot_).weighted[kLinearVelocityTracking],
              0.0073575888234288465, 1e-12);
}

TEST_F(RewardTest, HeightError) {
  cur_.trunk.position.z() = 0.35;
  EXPECT_NEAR(ComputeReward(Inputs(), robot_).weighted[kTrunkHeight],
              -0.013416140243841888, 1e-12);
}

TEST_F(RewardTest, TouchdownAirTime) {
  const std::vector<double> air = {0.3, 0.3};
  RewardInputs in = Inputs();
  in.touchdown_air_times = air;
  EXPECT_NEAR(ComputeReward(in, robot_).weighted[kFootAirTime], -0.012, 1e-12);
  in.touchdown_air_times = {};
  EXPECT_EQ(ComputeReward(in, robot_).weighted[kFootAirTime], 0.0);
}

// Every term against numbers worked out by hand from the Table I
// expressions, for one state where each term is non-trivial.
TEST_F(RewardTest, AllTermsByHand) {
  robot_.hip_mount_y = 0.0;
  robot_.hip_offset = 0.01;
  prev_ = StandingState(SimConfig{}, 0.32, 0.32);
  prev_.q = NominalJointAngles(robot_, 0.32);
  cur_ = prev_;
  cur_.trunk.position.z() = 0.35;
  cur_.trunk.linear_velocity = {0.3, 0.1, 0.2};
  cur_.trunk.angular_velocity = {0.1, -0.2, 0.3};
  for (int j = 0; j < kNumJoints; ++j) cur_.qdot(j) = 0.01 * j;

  RewardInputs in = Inputs();
  in.cmd = {0.5, 0.0, 0.4};
  in.action = JointVector::Constant(0.1);
  in.prev_action = JointVector::Zero();
  const std::vector<double> air = {0.3, 0.3};
  in.touchdown_air_times = air;
  // Offsets with squared norm 0.01 * l, so leg l scores exp(-0.5 l).
  for (int l = 0; l < kNumLegs; ++l) {
    in.desired_feet[l] += Eigen::Vector3d(0.0, std::sqrt(0.01 * l), 0.0);
  }

  const RewardBreakdown r = ComputeReward(in, robot_);
  const double dt = kDt;
  // |(0.5, 0) - (0.3, 0.1)|^2 = 0.05
  EXPECT_NEAR(r.weighted[kLinearVelocityTracking], std::exp(-0.2) * 1.0 * dt,
              1e-12);
  // (0.4 - 0.3)^2 = 0.01
  EXPECT_NEAR(r.weighted[kAngularVelocityTracking], std::exp(-0.04) * 0.5 * dt,
              1e-12);
  EXPECT_NEAR(r.weighted[kLinearVelocityPenalty], 0.04 * -2.0 * dt, 1e-12);
  EXPECT_NEAR(r.weighted[kAngularVelocityPenalty], 0.05 * -0.05 * dt, 1e-12);
  EXPECT_NEAR(r.weighted[kTrunkOrientation], 0.0, 1e-12);
  EXPECT_NEAR(r.weighted[kTrunkHeight],
              (1.0 - std::exp(-0.0009 / 8.1e-4)) * -1.0 * dt, 1e-12);
  // sum_j (0.01 j / 0.02)^2 = 0.25 * sum_j j^2 = 0.25 * 506
  EXPECT_NEAR(r.weighted[kJointAcceleration], 126.5 * -1e-7 * dt, 1e-12);
  EXPECT_NEAR(r.weighted[kActionRate], 0.12 * -0.005 * dt, 1e-12);
  // Feet 2 cm apart across the body on both axles.
  EXPECT_NEAR(r.weighted[kSelfCollision], 2.0 * -0.001 * dt, 1e-12);
  EXPECT_NEAR(r.weighted[kFootAirTime], -0.4 * 1.5 * dt, 1e-12);
  EXPECT_NEAR(r.weighted[kFootPosition],
              (1.0 + std::exp(-0.5) + std::exp(-1.0) + std::exp(-1.5)) * 0.3 *
                  dt,
              1e-12);

  double sum = 0.0;
  for (double w : r.weighted) sum += w;
  EXPECT_EQ(r.total, sum);
}

TEST_F(RewardTest, OrientationByHand) {
  cur_.trunk.orientation =
      Eigen::Quaterniond(Eigen::AngleAxisd(0.2, Eigen::Vector3d::UnitX()));
  const RewardBreakdown r = ComputeReward(Inputs(), robot_);
  EXPECT_NEAR(r.weighted[kTrunkOrientation],
              std::pow(std::sin(0.2), 2) * -5.0 * kDt, 1e-12);
}

TEST_F(RewardTest, VelocitiesAreBodyFrame) {
  cur_.trunk.orientation =
      Eigen::Quaterniond(Eigen::AngleAxisd(0.5, Eigen::Vector3d::UnitZ()));
  cur_.trunk.linear_velocity = {std::cos(0.5), std::sin(0.5), 0.0};
  RewardInputs in = Inputs();
  in.cmd = {1.0, 0.0, 0.0};
  EXPECT_NEAR(ComputeReward(in, robot_).raw[kLinearVelocityTracking], 1.0,
              1e-15);
}

TEST_F(RewardTest, SignsAndTotalOnRandomStates) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    cur_ = Standing();
    cur_.trunk.position.z() = 0.3 + 0.1 * u(rng);
    cur_.trunk.linear_velocity = {u(rng), u(rng), u(rng)};
    cur_.trunk.angular_velocity = {u(rng), u(rng), u(rng)};
    cur_.trunk.orientation = Eigen::Quaterniond(
        Eigen::AngleAxisd(u(rng), Eigen::Vector3d(u(rng), u(rng), 1.0).normalized()));
    for (int j = 0; j < kNumJoints; ++j) {
      cur_.q(j) += 0.5 * u(rng);
      cur_.qdot(j) = 5.0 * u(rng);
    }
    RewardInputs in = Inputs();
    in.cmd = {u(rng), u(rng), u(rng)};
    for (int j = 0; j < kNumJoints; ++j) {
      in.action(j) = u(rng);
      in.prev_action(j) = u(rng);
    }
    const std::vector<double> air = {t(rng), t(rng)};
    in.touchdown_air_times = air;
    const RewardBreakdown r = ComputeReward(in, robot_);
    for (int k : {kLinearVelocityTracking, kAngularVelocityTracking,
                  kFootPosition}) {
      EXPECT_GE(r.weighted[k], 0.0);
    }
    for (int k : {kLinearVelocityPenalty, kAngularVelocityPenalty,
                  kTrunkOrientation, kTrunkHeight, kJointAcceleration,
                  kActionRate, kSelfCollision}) {
      EXPECT_LE(r.weighted[k], 0.0);
    }
    double sum = 0.0;
    for (double w : r.weighted) sum += w;
    EXPECT_EQ(r.total, sum);
  }
}

TEST_F(RewardTest, TrackingDecreasesWithError) {
  RewardInputs in = Inputs();
  in.cmd = {0.5, 0.0, 0.5};
  double last_lin = 1e9, last_ang = 1e9;
  for (double e = 0.0; e < 2.0; e += 0.05) {
    cur_.trunk.linear_velocity = {0.5 + e, 0.0, 0.0};
    cur_.trunk.angular_velocity = {0.0, 0.0, 0.5 - e};
    const RewardBreakdown r = ComputeReward(in, robot_);
    EXPECT_LT(r.weighted[kLinearVelocityTracking], last_lin);
    EXPECT_LT(r.weighted[kAngularVelocityTracking], last_ang);
    if (e == 0.0) {
      EXPECT_EQ(r.weighted[kLinearVelocityTracking], 1.0 * kDt);
      EXPECT_EQ(r.weighted[kAngularVelocityTracking], 0.5 * kDt);
    }
    last_lin = r.weighted[kLinearVelocityTracking];
    last_ang = r.weighted[kAngularVelocityTracking];
  }
}

TEST_F(RewardTest, RejectsBadStep) {
  RewardInputs in = Inputs();
  in.dt = 0.0;
  EXPECT_THROW(ComputeReward(in, robot_), InvalidParams);
}

}  // namespace
}  // namespace synloco
