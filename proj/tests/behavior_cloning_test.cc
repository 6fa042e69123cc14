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

#include "synloco/behavior_cloning.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "synloco/errors.h"
#include "synloco/gait_analysis.h"

namespace synloco {
namespace {

std::vector<double> Heights(const std::vector<Eigen::Vector3d>& trace) {
  std::vector<double> z;
  for (const auto& p : trace) z.push_back(p.z());
  return z;
}

// One full period of a trace (the first `n` samples).
std::vector<double> FirstPeriod(const std::vector<double>& v, int n) {
  return std::vector<double>(v.begin(), v.begin() + n);
}

std::string WriteText(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + "/" + name;
  std::ofstream(path) << text;
  return path;
}

class BehaviorCloningTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new GaitPlannerModel(BuildGaitPlanner(
        {}, 20, 0.1, NominalJointAngles(RobotGeometry{}, 0.32)));
    FitOptions options;
    options.split_seed = 1;
    fit_ = new FitResult(FitMotorLayer(
        GenerateDemoTrot({}, RobotGeometry{}), *model_, RobotGeometry{},
        options));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete fit_;
  }
  static const GaitPlannerModel& model() { return *model_; }
  static const FitResult& fit() { return *fit_; }
  static GaitPlannerModel Fitted() {
    GaitPlannerModel m = *model_;
    m.motor = fit_->motor;
    return m;
  }

 private:
  static GaitPlannerModel* model_;
  static FitResult* fit_;
};

GaitPlannerModel* BehaviorCloningTest::model_ = nullptr;
FitResult* BehaviorCloningTest::fit_ = nullptr;

TEST_F(BehaviorCloningTest, TrotDiagonalsInPhase) {
  DemoTrotParams p;
  const DemoTrajectory demo = GenerateDemoTrot(p, RobotGeometry{});
  const int period = static_cast<int>(std::lround(p.sample_rate / p.frequency));
  const auto fr = FirstPeriod(Heights(demo.feet[0]), period);
  const auto fl = FirstPeriod(Heights(demo.feet[1]), period);
  const auto rr = FirstPeriod(Heights(demo.feet[2]), period);
  const auto rl = FirstPeriod(Heights(demo.feet[3]), period);
  EXPECT_EQ(CircularCrossCorrelationPeakLag(fr, rl), 0);
  EXPECT_EQ(CircularCrossCorrelationPeakLag(fl, rr), 0);
  EXPECT_LE(CircularLagDistance(CircularCrossCorrelationPeakLag(fr, fl),
                                period / 2, period),
            1);
}

TEST_F(BehaviorCloningTest, TrotClearances) {
  DemoTrotParams p;
  const DemoTrajectory demo = GenerateDemoTrot(p, RobotGeometry{});
  for (Leg leg : kAllLegs) {
    const auto z = Heights(demo.feet[LegIndex(leg)]);
    const double stance = -p.stand_height;
    double peak = -1e9;
    for (double v : z) peak = std::max(peak, v);
    EXPECT_NEAR(peak - stance, IsFront(leg) ? 0.07 : 0.04, 1e-9);
    int at_stance = 0;
    for (double v : z) at_stance += (std::abs(v - stance) < 1e-12);
    EXPECT_GT(static_cast<double>(at_stance) / z.size(), 0.5);
  }
}

TEST_F(BehaviorCloningTest, TrotRejectsBadParams) {
  DemoTrotParams p;
  p.stance_fraction = 0.4;
  EXPECT_THROW(GenerateDemoTrot(p, RobotGeometry{}), InvalidParams);
  p = {};
  p.stance_fraction = 1.0;
  EXPECT_THROW(GenerateDemoTrot(p, RobotGeometry{}), InvalidParams);
  p = {};
  p.clearance_rear = 0.0;
  EXPECT_THROW(GenerateDemoTrot(p, RobotGeometry{}), InvalidParams);
  p = {};
  p.step_length = -0.1;
  EXPECT_THROW(GenerateDemoTrot(p, RobotGeometry{}), InvalidParams);
}

TEST_F(BehaviorCloningTest, CsvRoundTripIsExact) {
  const DemoTrajectory demo = GenerateDemoTrot({}, RobotGeometry{});
  const std::string path = ::testing::TempDir() + "/demo_roundtrip.csv";
  WriteDemoCsv(path, demo);
  const DemoTrajectory back = LoadDemoCsv(path, demo.gait_frequency);
  EXPECT_EQ(back.times, demo.times);
  for (int l = 0; l < kNumLegs; ++l) EXPECT_EQ(back.feet[l], demo.feet[l]);
  EXPECT_EQ(back.gait_frequency, demo.gait_frequency);
}

TEST_F(BehaviorCloningTest, CsvMeasuresGaitFrequency) {
  const DemoTrajectory demo = GenerateDemoTrot({}, RobotGeometry{});
  const std::string path = ::testing::TempDir() + "/demo_freq.csv";
  WriteDemoCsv(path, demo);
  EXPECT_NEAR(LoadDemoCsv(path).gait_frequency, 1.5, 1e-9);
}

TEST_F(BehaviorCloningTest, CsvWithThreeLegs) {
  const std::string path = WriteText(
      "three_legs.csv",
      "t,leg,x,y,z\n0,FR,0,0,-0.3\n0,FL,0,0,-0.3\n0,RR,0,0,-0.3\n"
      "0.1,FR,0,0,-0.3\n0.1,FL,0,0,-0.3\n0.1,RR,0,0,-0.3\n");
  try {
    LoadDemoCsv(path, 1.5);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("RL"), std::string::npos);
  }
}

TEST_F(BehaviorCloningTest, CsvMissingColumn) {
  const std::string path = WriteText("no_z.csv", "t,leg,x,y\n0,FR,0,0\n");
  try {
    LoadDemoCsv(path, 1.5);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("missing columns: z"),
              std::string::npos);
  }
}

TEST_F(BehaviorCloningTest, CsvNanCell) {
  const std::string path = WriteText(
      "nan.csv", "t,leg,x,y,z\n0,FR,0,0,-0.3\n0,FL,0,nan,-0.3\n");
  try {
    LoadDemoCsv(path, 1.5);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 4u);
    EXPECT_NE(std::string(e.what()).find("column y"), std::string::npos);
  }
}

TEST_F(BehaviorCloningTest, SyntheticTrotFit) {
  // Regression value from the reference run: 5.56e-4 m.
  EXPECT_LT(fit().report.ValRmse(), 1e-3);
  EXPECT_LT(fit().report.ValRmse(), 5e-3);
  EXPECT_EQ(fit().report.num_train, 84);
  EXPECT_EQ(fit().report.num_val, 36);
}

TEST_F(BehaviorCloningTest, RefinementDoesNotIncreaseLoss) {
  EXPECT_LE(fit().report.train_mse, fit().report.init_train_mse);
}

TEST_F(BehaviorCloningTest, ClearancePreserved) {
  for (int l = 0; l < kNumLegs; ++l) {
    EXPECT_NEAR(fit().report.fit_clearance[l], fit().report.demo_clearance[l],
                0.01);
  }
  EXPECT_NEAR(fit().report.demo_clearance[0], 0.07, 1e-6);
  EXPECT_NEAR(fit().report.demo_clearance[2], 0.04, 1e-6);
}

TEST_F(BehaviorCloningTest, FittedPlannerKeepsTrotPhases) {
  const BaselineTrajectory traj =
      SampleBaseline(Fitted(), RobotGeometry{}, 1);
  std::array<std::vector<double>, kNumLegs> z;
  for (const auto& feet : traj.feet) {
    for (int l = 0; l < kNumLegs; ++l) z[l].push_back(feet[l].z());
  }
  const int n = static_cast<int>(z[0].size());
  EXPECT_EQ(CircularCrossCorrelationPeakLag(z[0], z[3]), 0);
  EXPECT_EQ(CircularCrossCorrelationPeakLag(z[1], z[2]), 0);
  EXPECT_LE(CircularLagDistance(CircularCrossCorrelationPeakLag(z[0], z[1]),
                                n / 2, n),
            1);
}

TEST_F(BehaviorCloningTest, SplitIsSeeded) {
  FitOptions options;
  options.split_seed = 1;
  options.refine_steps = 50;
  const DemoTrajectory demo = GenerateDemoTrot({}, RobotGeometry{});
  const FitResult a = FitMotorLayer(demo, model(), RobotGeometry{}, options);
  const FitResult b = FitMotorLayer(demo, model(), RobotGeometry{}, options);
  EXPECT_EQ(a.motor.weights, b.motor.weights);
  EXPECT_EQ(a.report.val_mse, b.report.val_mse);
  options.split_seed = 2;
  const FitResult c = FitMotorLayer(demo, model(), RobotGeometry{}, options);
  EXPECT_NE(a.report.val_mse, c.report.val_mse);
}

// A demonstration the planner can produce exactly: feet from a motor layer
// through forward kinematics, sampled on the orbit. The front-right knee
// is straightest at orbit sample 0 so liftoff, the phase origin, falls
// there.
TEST_F(BehaviorCloningTest, RecoversRealizableDemo) {
  RobotGeometry robot;
  GaitPlannerModel truth = model();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.08, 0.08);
  for (int i = 0; i < truth.motor.weights.size(); ++i) {
    truth.motor.weights.data()[i] = u(rng);
  }
  const Eigen::VectorXd r0 = RbfActivations(truth.orbit.samples[0], truth.rbf);
  truth.motor.weights.col(0).setZero();
  truth.motor.weights.col(1).setZero();
  truth.motor.weights.col(2) = 0.3 * r0 / r0.squaredNorm();

  const int period = truth.orbit.period_ticks;
  DemoTrajectory demo;
  demo.sample_rate = truth.params.tick_rate;
  demo.gait_frequency = truth.params.tick_rate / period;
  const BaselineTrajectory traj = SampleBaseline(truth, robot, 2);
  for (size_t k = 0; k < traj.feet.size(); ++k) {
    demo.times.push_back(k / demo.sample_rate);
    for (int l = 0; l < kNumLegs; ++l) demo.feet[l].push_back(traj.feet[k][l]);
  }
  const auto fr = Heights(demo.feet[0]);
  ASSERT_EQ(std::min_element(fr.begin(), fr.begin() + period) - fr.begin(), 0);
  ASSERT_GT(fr[1], fr[0]);

  FitOptions options;
  options.split_seed = 4;
  const FitResult fit = FitMotorLayer(demo, model(), robot, options);
  EXPECT_LT(fit.report.ValRmse(), 1e-6);
}

TEST_F(BehaviorCloningTest, UnreachableDemo) {
  DemoTrajectory demo = GenerateDemoTrot({}, RobotGeometry{});
  RobotGeometry robot;
  const Eigen::Vector3d hip = robot.ForLeg(Leg::kRR).hip_mount;
  demo.feet[2][10] = hip + Eigen::Vector3d(0.0, -0.08, -0.6);
  FitOptions options;
  EXPECT_THROW(FitMotorLayer(demo, model(), robot, options), IkUnreachable);
}

TEST_F(BehaviorCloningTest, RefinementGradientMatchesFiniteDifferences) {
  RobotGeometry robot;
  const auto targets =
      ResampleDemo(GenerateDemoTrot({}, robot), model().orbit.period_ticks);
  std::vector<int> indices(model().orbit.period_ticks);
  std::iota(indices.begin(), indices.end(), 0);
  MotorLayer motor = fit().motor;
  std::mt19937_64 rng(29);
  std::normal_distribution<double> n(0.0, 0.05);
  for (int i = 0; i < motor.weights.size(); ++i) motor.weights.data()[i] += n(rng);

  MotorLayer grad;
  FootSpaceMse(model(), motor, robot, targets, indices, &grad);
  const double h = 1e-5;
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double hi = FootSpaceMse(model(), motor, robot, targets, indices);
    param = saved - h;
    const double lo = FootSpaceMse(model(), motor, robot, targets, indices);
    param = saved;
    const double numeric = (hi - lo) / (2 * h);
    const double scale = std::max(std::abs(numeric), 1e-6);
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  for (int i = 0; i < motor.weights.size(); i += 7) {
    check(motor.weights.data()[i], grad.weights.data()[i]);
  }
  for (int j = 0; j < kNumJoints; ++j) check(motor.bias(j), grad.bias(j));
  EXPECT_LT(worst, 1e-4);
}

}  // namespace
}  // namespace synloco
