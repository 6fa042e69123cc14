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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "synloco/errors.h"

namespace synloco {
namespace {

using FootTargets = std::array<std::vector<Eigen::Vector3d>, kNumLegs>;

// Phase offsets in cycles, leg order FR, FL, RR, RL.
constexpr std::array<double, kNumLegs> kTrotPhaseOffset = {0.0, 0.5, 0.5, 0.0};

double Frac(double x) { return x - std::floor(x); }

// Indices of the last stance samples before each liftoff of `trace`.
std::vector<int> LiftoffIndices(const std::vector<Eigen::Vector3d>& trace) {
  std::vector<int> out;
  double lo = trace.front().z();
  double hi = lo;
  for (const auto& p : trace) {
    lo = std::min(lo, p.z());
    hi = std::max(hi, p.z());
  }
  const double threshold = lo + 1e-3 * std::max(hi - lo, 1e-9);
  for (size_t k = 1; k < trace.size(); ++k) {
    if (trace[k - 1].z() <= threshold && trace[k].z() > threshold) {
      out.push_back(static_cast<int>(k - 1));
    }
  }
  return out;
}

// Index of the last stance sample before the first front-right liftoff.
int FindLiftoff(const std::vector<Eigen::Vector3d>& front_right) {
  const std::vector<int> liftoffs = LiftoffIndices(front_right);
  return liftoffs.empty() ? -1 : liftoffs.front();
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    size_t start = cell.find_first_not_of(' ');
    cells.push_back(start == std::string::npos ? "" : cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Solves min ||design * x - targets||^2 + ridge * ||x without last row||^2.
Eigen::MatrixXd RidgeSolve(const Eigen::MatrixXd& design,
                           const Eigen::MatrixXd& targets, double ridge) {
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols();
  Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(n + m - 1, m);
  augmented.topRows(n) = design;
  augmented.bottomLeftCorner(m - 1, m - 1).diagonal().setConstant(
      std::sqrt(ridge));
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + m - 1, targets.cols());
  rhs.topRows(n) = targets;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(augmented);
  qr.setThreshold(1e-13);
  if (qr.rank() < m) {
    throw SingularFit("RBF design matrix has rank " +
                      std::to_string(qr.rank()) + " < " + std::to_string(m) +
                      " even with ridge regularization");
  }
  Eigen::MatrixXd solution = qr.solve(rhs);
  if (!solution.allFinite()) throw SingularFit("least-squares fit diverged");
  return solution;
}

struct FitProblem {
  std::vector<Eigen::VectorXd> activations;  // per orbit sample
  FootTargets targets;
  std::vector<int> indices;
  std::array<LegGeometry, kNumLegs> legs;
};

double ProblemLoss(const FitProblem& problem, const MotorLayer& motor,
                   MotorLayer* gradient) {
  const double scale = 1.0 / (problem.indices.size() * kNumLegs);
  double loss = 0.0;
  if (gradient != nullptr) {
    gradient->weights = Eigen::MatrixXd::Zero(motor.weights.rows(), kNumJoints);
    gradient->bias.setZero();
  }
  for (int k : problem.indices) {
    const Eigen::VectorXd& r = problem.activations[k];
    const JointVector q = motor.weights.transpose() * r + motor.bias;
    for (Leg leg : kAllLegs) {
      const int l = LegIndex(leg);
      const LegAngles ql = LegSegment(q, leg);
      const Eigen::Vector3d err =
          ForwardKinematics(ql, problem.legs[l]) - problem.targets[l][k];
      loss += err.squaredNorm();
      if (gradient != nullptr) {
        const Eigen::Vector3d dq =
            2.0 * scale * LegJacobian(ql, problem.legs[l]).transpose() * err;
        gradient->weights.middleCols<kJointsPerLeg>(kJointsPerLeg * l) +=
            r * dq.transpose();
        gradient->bias.segment<kJointsPerLeg>(kJointsPerLeg * l) += dq;
      }
    }
  }
  return loss * scale;
}

}  // namespace

void ValidateDemo(const DemoTrajectory& demo) {
  const size_t n = demo.times.size();
  if (n < 2) throw InvalidParams("demo needs at least two samples");
  for (const auto& leg : demo.feet) {
    if (leg.size() != n) {
      throw InvalidParams("demo legs have different sample counts");
    }
  }
  for (size_t k = 1; k < n; ++k) {
    if (!(demo.times[k] > demo.times[k - 1])) {
      throw InvalidParams("demo times must be strictly increasing");
    }
  }
  if (!(demo.sample_rate > 0.0) || !(demo.gait_frequency > 0.0)) {
    throw InvalidParams("demo sample rate and gait frequency must be positive");
  }
  const double span = demo.times.back() - demo.times.front() +
                      1.0 / demo.sample_rate;
  if (span * demo.gait_frequency < 1.0 - 1e-9) {
    throw InvalidParams("demo covers less than one gait period");
  }
}

DemoTrajectory GenerateDemoTrot(const DemoTrotParams& params,
                                const RobotGeometry& robot) {
  if (!(params.stance_fraction >= 0.5 && params.stance_fraction < 1.0)) {
    throw InvalidParams("stance fraction must lie in [0.5, 1)");
  }
  if (!(params.clearance_front > 0.0 && params.clearance_rear > 0.0 &&
        params.step_length > 0.0)) {
    throw InvalidParams("clearances and step length must be positive");
  }
  if (!(params.frequency > 0.0 && params.sample_rate > 0.0 &&
        params.stand_height > 0.0 && params.num_periods >= 1)) {
    throw InvalidParams("frequency, sample rate, stand height and period "
                        "count must be positive");
  }
  const double swing = 1.0 - params.stance_fraction;
  const int n = static_cast<int>(std::lround(
      params.num_periods * params.sample_rate / params.frequency));

  DemoTrajectory demo;
  demo.sample_rate = params.sample_rate;
  demo.gait_frequency = params.frequency;
  demo.times.resize(n);
  for (Leg leg : kAllLegs) {
    const int l = LegIndex(leg);
    const Eigen::Vector3d stand =
        StandingFootPosition(robot, leg, params.stand_height);
    const double clearance =
        IsFront(leg) ? params.clearance_front : params.clearance_rear;
    demo.feet[l].resize(n);
    for (int k = 0; k < n; ++k) {
      demo.times[k] = k / params.sample_rate;
      const double phase =
          Frac(k * params.frequency / params.sample_rate + kTrotPhaseOffset[l]);
      Eigen::Vector3d p = stand;
      if (phase < swing) {
        const double u = phase / swing;
        p.x() += params.step_length * (0.5 - 0.5 * std::cos(M_PI * u)) -
                 0.5 * params.step_length;
        p.z() += clearance * std::sin(M_PI * u);
      } else {
        const double u = (phase - swing) / params.stance_fraction;
        p.x() += 0.5 * params.step_length - params.step_length * u;
      }
      demo.feet[l][k] = p;
    }
  }
  return demo;
}

DemoTrajectory LoadDemoCsv(const std::string& path, double gait_frequency) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open demo file " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  const std::vector<std::string> header = SplitCsvLine(line);
  std::map<std::string, size_t> column;
  for (size_t c = 0; c < header.size(); ++c) column[header[c]] = c;
  std::string missing;
  for (const char* name : {"t", "leg", "x", "y", "z"}) {
    if (!column.count(name)) missing += std::string(missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) {
    throw SchemaError(path + ": missing columns: " + missing);
  }

  std::array<std::vector<double>, kNumLegs> times;
  DemoTrajectory demo;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw ParseError(path + ": row " + std::to_string(row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(header.size()),
                       row, cells.size());
    }
    Leg leg;
    const size_t leg_col = column["leg"];
    if (!ParseLegName(cells[leg_col], &leg)) {
      throw ParseError(path + ": row " + std::to_string(row) +
                           ", column leg: unknown leg '" + cells[leg_col] + "'",
                       row, leg_col + 1);
    }
    std::array<double, 4> values{};
    const char* names[4] = {"t", "x", "y", "z"};
    for (int v = 0; v < 4; ++v) {
      const size_t c = column[names[v]];
      const std::string& text = cells[c];
      char* end = nullptr;
      const double value = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size() ||
          !std::isfinite(value)) {
        throw ParseError(path + ": row " + std::to_string(row) + ", column " +
                             names[v] + ": invalid number '" + text + "'",
                         row, c + 1);
      }
      values[v] = value;
    }
    const int l = LegIndex(leg);
    if (!times[l].empty() && !(values[0] > times[l].back())) {
      throw ParseError(path + ": row " + std::to_string(row) +
                           ", column t: time not strictly increasing for leg " +
                           cells[leg_col],
                       row, column["t"] + 1);
    }
    times[l].push_back(values[0]);
    demo.feet[l].emplace_back(values[1], values[2], values[3]);
  }

  std::string absent;
  for (Leg leg : kAllLegs) {
    if (times[LegIndex(leg)].empty()) {
      absent += std::string(absent.empty() ? "" : ", ") + std::string(LegName(leg));
    }
  }
  if (!absent.empty()) throw SchemaError(path + ": no rows for legs " + absent);
  for (int l = 1; l < kNumLegs; ++l) {
    if (times[l] != times[0]) {
      throw SchemaError(path + ": legs must share the same time stamps");
    }
  }
  demo.times = times[0];
  if (demo.times.size() < 2) throw SchemaError(path + ": need two samples");
  demo.sample_rate =
      (demo.times.size() - 1) / (demo.times.back() - demo.times.front());
  if (gait_frequency > 0.0) {
    demo.gait_frequency = gait_frequency;
  } else {
    const std::vector<int> liftoffs =
        LiftoffIndices(demo.feet[LegIndex(Leg::kFR)]);
    if (liftoffs.size() < 2) {
      throw SchemaError(path + ": cannot measure the gait frequency from "
                        "fewer than two front-right liftoffs");
    }
    const double period = (demo.times[liftoffs.back()] -
                           demo.times[liftoffs.front()]) /
                          (liftoffs.size() - 1);
    demo.gait_frequency = 1.0 / period;
  }
  try {
    ValidateDemo(demo);
  } catch (const InvalidParams& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return demo;
}

void WriteDemoCsv(const std::string& path, const DemoTrajectory& demo) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write demo file " + path);
  out << std::setprecision(17);
  out << "t,leg,x,y,z\n";
  for (int k = 0; k < demo.size(); ++k) {
    for (Leg leg : kAllLegs) {
      const Eigen::Vector3d& p = demo.feet[LegIndex(leg)][k];
      out << demo.times[k] << ',' << LegName(leg) << ',' << p.x() << ','
          << p.y() << ',' << p.z() << '\n';
    }
  }
}

std::array<std::vector<Eigen::Vector3d>, kNumLegs> ResampleDemo(
    const DemoTrajectory& demo, int samples_per_period) {
  ValidateDemo(demo);
  if (samples_per_period < 2) {
    throw InvalidParams("need at least two samples per period");
  }
  const int origin = FindLiftoff(demo.feet[LegIndex(Leg::kFR)]);
  if (origin < 0) throw InvalidParams("demo has no front-right liftoff");
  const double t0 = demo.times[origin];

  std::vector<std::pair<double, int>> phases;
  phases.reserve(demo.times.size());
  for (int k = 0; k < demo.size(); ++k) {
    phases.emplace_back(Frac((demo.times[k] - t0) * demo.gait_frequency), k);
  }
  std::stable_sort(phases.begin(), phases.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  FootTargets out;
  const size_t n = phases.size();
  for (int l = 0; l < kNumLegs; ++l) out[l].resize(samples_per_period);
  for (int i = 0; i < samples_per_period; ++i) {
    const double phase = static_cast<double>(i) / samples_per_period;
    const auto upper_it = std::lower_bound(
        phases.begin(), phases.end(), phase,
        [](const auto& entry, double value) { return entry.first < value; });
    const size_t upper = (upper_it == phases.end()) ? 0 : upper_it - phases.begin();
    const double upper_phase =
        (upper_it == phases.end()) ? phases[0].first + 1.0 : phases[upper].first;
    const size_t lower = (upper_it == phases.begin()) ? n - 1 : (upper_it - phases.begin()) - 1;
    const double lower_phase = (upper_it == phases.begin())
                                   ? phases[lower].first - 1.0
                                   : phases[lower].first;
    const double width = upper_phase - lower_phase;
    const double w = (upper_phase == phase || width <= 0.0)
                         ? 1.0
                         : (phase - lower_phase) / width;
    for (int l = 0; l < kNumLegs; ++l) {
      const Eigen::Vector3d& a = demo.feet[l][phases[lower].second];
      const Eigen::Vector3d& b = demo.feet[l][phases[upper].second];
      out[l][i] = (w == 1.0) ? b : Eigen::Vector3d((1.0 - w) * a + w * b);
    }
  }
  return out;
}

double FitReport::ValRmse() const { return std::sqrt(val_mse); }

double FootSpaceMse(const GaitPlannerModel& model, const MotorLayer& motor,
                    const RobotGeometry& robot, const FootTargets& targets,
                    const std::vector<int>& indices, MotorLayer* gradient) {
  FitProblem problem;
  problem.targets = targets;
  problem.indices = indices;
  for (Leg leg : kAllLegs) problem.legs[LegIndex(leg)] = robot.ForLeg(leg);
  problem.activations.resize(model.orbit.period_ticks);
  for (int k : indices) {
    problem.activations[k] = RbfActivations(model.orbit.samples[k], model.rbf);
  }
  return ProblemLoss(problem, motor, gradient);
}

FitResult FitMotorLayer(const DemoTrajectory& demo,
                        const GaitPlannerModel& model,
                        const RobotGeometry& robot,
                        const FitOptions& options) {
  const int period = model.orbit.period_ticks;
  const int num_centers = model.rbf.size();
  FitProblem problem;
  problem.targets = ResampleDemo(demo, period);
  for (Leg leg : kAllLegs) problem.legs[LegIndex(leg)] = robot.ForLeg(leg);

  // Joint-space targets for the convex initialization.
  Eigen::MatrixXd joint_targets(period, kNumJoints);
  for (int k = 0; k < period; ++k) {
    for (Leg leg : kAllLegs) {
      const int l = LegIndex(leg);
      joint_targets.block<1, kJointsPerLeg>(k, kJointsPerLeg * l) =
          InverseKinematics(problem.targets[l][k], problem.legs[l]).transpose();
    }
  }

  Eigen::MatrixXd design(period, num_centers + 1);
  problem.activations.resize(period);
  for (int k = 0; k < period; ++k) {
    problem.activations[k] = RbfActivations(model.orbit.samples[k], model.rbf);
    design.row(k).head(num_centers) = problem.activations[k].transpose();
    design(k, num_centers) = 1.0;
  }

  std::vector<int> order(period);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.split_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int num_train = std::clamp(
      static_cast<int>(std::lround(options.train_fraction * period)), 1, period);
  std::vector<int> train(order.begin(), order.begin() + num_train);
  std::vector<int> val(order.begin() + num_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());

  Eigen::MatrixXd train_design(num_train, num_centers + 1);
  Eigen::MatrixXd train_targets(num_train, kNumJoints);
  for (int i = 0; i < num_train; ++i) {
    train_design.row(i) = design.row(train[i]);
    train_targets.row(i) = joint_targets.row(train[i]);
  }
  const Eigen::MatrixXd solution =
      RidgeSolve(train_design, train_targets, options.ridge);

  FitResult result;
  result.motor.weights = solution.topRows(num_centers);
  result.motor.bias = solution.row(num_centers).transpose();

  problem.indices = train;
  double loss = ProblemLoss(problem, result.motor, nullptr);
  result.report.init_train_mse = loss;
  double step = options.refine_step_size;
  MotorLayer gradient;
  for (int it = 0; it < options.refine_steps; ++it) {
    ProblemLoss(problem, result.motor, &gradient);
    MotorLayer candidate;
    candidate.weights = result.motor.weights - step * gradient.weights;
    candidate.bias = result.motor.bias - step * gradient.bias;
    const double candidate_loss = ProblemLoss(problem, candidate, nullptr);
    if (candidate_loss <= loss) {
      result.motor = std::move(candidate);
      loss = candidate_loss;
    } else {
      step *= 0.5;
    }
  }
  result.report.train_mse = loss;
  result.report.num_train = num_train;
  result.report.num_val = period - num_train;
  if (!val.empty()) {
    problem.indices = val;
    result.report.val_mse = ProblemLoss(problem, result.motor, nullptr);
  }

  GaitPlannerModel fitted = model;
  fitted.motor = result.motor;
  result.report.fit_clearance = BaselineClearance(fitted, robot);
  for (int l = 0; l < kNumLegs; ++l) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : problem.targets[l]) {
      lo = std::min(lo, p.z());
      hi = std::max(hi, p.z());
    }
    result.report.demo_clearance[l] = hi - lo;
  }
  return result;
}

}  // namespace synloco
