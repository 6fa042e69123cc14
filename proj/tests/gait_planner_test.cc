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

#include "synloco/gait_planner.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "synloco/errors.h"

namespace synloco {
namespace {

class GaitPlannerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { orbit_ = new PeriodicOrbit(FindLimitCycle({})); }
  static void TearDownTestSuite() {
    delete orbit_;
    orbit_ = nullptr;
  }
  static const PeriodicOrbit& orbit() { return *orbit_; }

  static GaitPlannerModel RandomModel(uint64_t seed) {
    RobotGeometry robot;
    GaitPlannerModel model =
        BuildGaitPlanner({}, 20, 0.1, NominalJointAngles(robot, 0.32));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (int i = 0; i < model.motor.weights.size(); ++i) {
      model.motor.weights.data()[i] = u(rng);
    }
    return model;
  }

 private:
  static PeriodicOrbit* orbit_;
};

PeriodicOrbit* GaitPlannerTest::orbit_ = nullptr;

TEST_F(GaitPlannerTest, SingleCenterIsFirstSample) {
  const auto centers = SampleRbfCenters(orbit(), 1);
  ASSERT_EQ(centers.size(), 1u);
  EXPECT_EQ(centers[0], orbit().samples[0]);
}

TEST_F(GaitPlannerTest, CentersUniformlySpaced) {
  ASSERT_EQ(orbit().period_ticks, 120);
  const auto centers = SampleRbfCenters(orbit(), 20);
  ASSERT_EQ(centers.size(), 20u);
  for (int h = 0; h < 20; ++h) EXPECT_EQ(centers[h], orbit().samples[6 * h]);
}

TEST_F(GaitPlannerTest, TooManyCenters) {
  EXPECT_THROW(SampleRbfCenters(orbit(), orbit().period_ticks + 1),
               TooManyCenters);
}

TEST_F(GaitPlannerTest, ActivationAtCenterIsOne) {
  RbfLayer rbf;
  rbf.centers = SampleRbfCenters(orbit(), 20);
  for (int h = 0; h < 20; ++h) {
    EXPECT_EQ(RbfActivations(rbf.centers[h], rbf)(h), 1.0);
  }
}

TEST_F(GaitPlannerTest, ActivationAtDistance) {
  RbfLayer rbf;
  rbf.sigma = 0.1;
  rbf.centers = {{0.05, -0.02}};
  const double angle = 0.7;
  for (double d : {0.1, 0.3}) {
    const OscillatorState s{0.05 + d * std::cos(angle),
                            -0.02 + d * std::sin(angle)};
    EXPECT_NEAR(RbfActivations(s, rbf)(0), std::exp(-d * d / 0.01), 1e-12);
  }
  EXPECT_NEAR(RbfActivations({0.15, -0.02}, rbf)(0), 0.36787944117144233,
              1e-12);
  EXPECT_NEAR(RbfActivations({0.05, 0.28}, rbf)(0), 1.2340980408667956e-4,
              1e-12);
}

TEST_F(GaitPlannerTest, ActivationsCoverTheOrbit) {
  RbfLayer rbf;
  rbf.centers = SampleRbfCenters(orbit(), 20);
  for (const OscillatorState& s : orbit().samples) {
    EXPECT_GE(RbfActivations(s, rbf).maxCoeff(), 0.5);
  }
}

TEST_F(GaitPlannerTest, ZeroWeightsGiveBias) {
  JointVector bias;
  for (int j = 0; j < kNumJoints; ++j) bias(j) = 0.1 * j - 0.5;
  const GaitPlannerModel model = BuildGaitPlanner({}, 20, 0.1, bias);
  for (int k = 0; k < orbit().period_ticks; k += 7) {
    EXPECT_EQ(PlannerForward(model.orbit.samples[k], model), bias);
  }
  EXPECT_EQ(PlannerForward({0.9, -0.9}, model), bias);
}

TEST_F(GaitPlannerTest, OnesColumnSumsActivations) {
  // Four centers a quarter turn apart are ~0.28 from each other, so the
  // center's own activation dominates the sum.
  GaitPlannerModel model =
      BuildGaitPlanner({}, 4, 0.1, JointVector::Constant(0.25));
  model.motor.weights.col(4).setOnes();
  const OscillatorState s = model.rbf.centers[3];
  const Eigen::VectorXd r = RbfActivations(s, model.rbf);
  const JointVector out = PlannerForward(s, model);
  EXPECT_NEAR(out(4), 0.25 + r.sum(), 1e-15);
  EXPECT_GE(out(4) - 0.25, 1.0);
  EXPECT_LT(out(4) - 0.25, 1.001);
  EXPECT_EQ(out(5), 0.25);
}

TEST_F(GaitPlannerTest, OutputPeriodicAlongOrbit) {
  const GaitPlannerModel model = RandomModel(1);
  RobotGeometry robot;
  const BaselineTrajectory traj = SampleBaseline(model, robot, 100);
  const int period = model.orbit.period_ticks;
  double worst = 0.0;
  for (size_t k = period; k < traj.joints.size(); ++k) {
    worst = std::max(worst,
                     (traj.joints[k] - traj.joints[k - period]).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-9);
}

// Running the oscillator itself is only quasi-periodic: it returns to
// within the orbit's closure gap rather than onto the same samples. The
// signal should stay as close to the orbit as that gap allows.
TEST_F(GaitPlannerTest, RunningSignalStaysNearOrbitSignal) {
  const GaitPlannerModel model = RandomModel(2);
  auto shared = std::make_shared<const GaitPlannerModel>(model);
  GaitPlanner planner(shared);
  double worst = 0.0;
  for (int t = 0; t < 100 * model.orbit.period_ticks; ++t) {
    const JointVector q = planner.Signal();
    double nearest = 1e9;
    for (const OscillatorState& s : model.orbit.samples) {
      nearest = std::min(
          nearest, (PlannerForward(s, model) - q).cwiseAbs().maxCoeff());
    }
    worst = std::max(worst, nearest);
    planner.Advance(1);
  }
  EXPECT_LT(worst, 0.05);
}

TEST_F(GaitPlannerTest, ResetReturnsToPhaseOrigin) {
  auto model = std::make_shared<const GaitPlannerModel>(RandomModel(3));
  GaitPlanner planner(model);
  EXPECT_EQ(planner.state(), model->orbit.samples.front());
  planner.Advance(37);
  EXPECT_EQ(planner.state(),
            AdvanceOscillator(model->orbit.samples.front(), model->params, 37));
  planner.Reset();
  EXPECT_EQ(planner.state(), model->orbit.samples.front());
}

TEST_F(GaitPlannerTest, ValidateCatchesBrokenModels) {
  GaitPlannerModel model = RandomModel(4);
  EXPECT_NO_THROW(ValidateGaitPlannerModel(model));
  GaitPlannerModel shifted = model;
  shifted.rbf.centers[1] = shifted.orbit.samples[7];
  EXPECT_THROW(ValidateGaitPlannerModel(shifted), InvalidParams);
  GaitPlannerModel bad = model;
  bad.motor.weights(0, 0) = std::nan("");
  EXPECT_THROW(ValidateGaitPlannerModel(bad), InvalidParams);
}

TEST_F(GaitPlannerTest, ModelRoundTrip) {
  RobotGeometry robot;
  robot.thigh_length = 0.2;
  const GaitPlannerModel model = RandomModel(5);
  const std::string path = ::testing::TempDir() + "/planner_roundtrip.json";
  SaveGaitPlannerModel(path, model, robot);
  RobotGeometry loaded_robot;
  const GaitPlannerModel loaded = LoadGaitPlannerModel(path, &loaded_robot);
  EXPECT_EQ(loaded.motor.weights, model.motor.weights);
  EXPECT_EQ(loaded.motor.bias, model.motor.bias);
  EXPECT_EQ(loaded.rbf.centers, model.rbf.centers);
  EXPECT_EQ(loaded.orbit.samples, model.orbit.samples);
  EXPECT_EQ(loaded.params.phi, model.params.phi);
  EXPECT_EQ(loaded_robot.thigh_length, 0.2);
  EXPECT_EQ(GaitPlannerModelToString(loaded, loaded_robot),
            GaitPlannerModelToString(model, robot));
}

}  // namespace
}  // namespace synloco
