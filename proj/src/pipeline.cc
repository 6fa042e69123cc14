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

#include "synloco/pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "synloco/errors.h"
#include "synloco/gait_analysis.h"
#include "synloco/kinematics.h"

namespace synloco {
namespace {

using nlohmann::json;

// Stream reserved for evaluation so it never aliases a training env.
constexpr uint64_t kEvalStream = 0xfffffffdu;

struct MeanStd {
  double sum = 0.0;
  double sq = 0.0;
  int n = 0;
  void Add(double x) {
    sum += x;
    sq += x * x;
    ++n;
  }
  double Mean() const { return n > 0 ? sum / n : 0.0; }
  double Std() const {
    if (n < 2) return 0.0;
    const double m = Mean();
    return std::sqrt(std::max(0.0, sq / n - m * m));
  }
};

std::vector<double> ContactSeries(const std::vector<EvalSample>& samples,
                                  int leg) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.state.contacts[leg] ? 1.0 : 0.0);
  return out;
}

}  // namespace

FittedPlanner FitPlannerFromConfig(const RunConfig& config) {
  const RobotGeometry& robot = config.env.sim.robot;
  const JointVector nominal =
      NominalJointAngles(robot, config.demo.trot.stand_height);
  FittedPlanner out;
  out.model = BuildGaitPlanner(config.planner.oscillator,
                               config.planner.num_centers,
                               config.planner.rbf_sigma, nominal,
                               config.planner.burn_in_ticks);
  const DemoTrajectory demo =
      config.demo.source == "synthetic"
          ? GenerateDemoTrot(config.demo.trot, robot)
          : LoadDemoCsv(config.demo.source, config.demo.csv_gait_frequency);
  FitOptions options = config.demo.fit;
  options.split_seed = config.seed;
  FitResult fit = FitMotorLayer(demo, out.model, robot, options);
  out.model.motor = std::move(fit.motor);
  out.report = fit.report;
  return out;
}

std::string MakeCheckpointHeader(const RunConfig& config,
                                 const GaitPlannerModel& planner) {
  json j;
  j["config_hash"] = HashToHex(ConfigHash(config));
  j["config"] = json::parse(RunConfigToJson(config));
  j["planner"] = GaitPlannerModelToString(planner, config.env.sim.robot);
  return j.dump();
}

CheckpointHeader ParseCheckpointHeader(const std::string& header) {
  json j;
  try {
    j = json::parse(header);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint header is not JSON: ") +
                          e.what());
  }
  if (!j.contains("config") || !j.contains("config_hash") ||
      !j.contains("planner")) {
    throw CheckpointError("checkpoint header lacks config or planner");
  }
  CheckpointHeader out;
  out.config = ParseRunConfig(j["config"].dump());
  out.config_hash = ConfigHash(out.config);
  if (HashToHex(out.config_hash) != j["config_hash"].get<std::string>()) {
    throw CheckpointError("checkpoint config does not match its stored hash");
  }
  out.planner = std::make_shared<GaitPlannerModel>(GaitPlannerModelFromString(
      j["planner"].get<std::string>(), "<checkpoint>"));
  return out;
}

EvalResult Evaluate(const RunConfig& config,
                    std::shared_ptr<const GaitPlannerModel> planner,
                    const PolicyState& policy) {
  auto env_config = std::make_shared<EnvConfig>(config.env);
  env_config->sensor_noise = false;
  env_config->impulses = false;
  env_config->randomize_dynamics = config.eval.dynamics_randomization;
  // A timeout must not cut an evaluation short.
  env_config->sim.max_episode_time =
      std::max(env_config->sim.max_episode_time, config.eval.duration + 1.0);
  ValidateEnvConfig(*env_config);

  LocomotionEnv env(env_config, std::move(planner),
                    MakeStreamRng(config.seed, kEvalStream));
  const CurriculumState curriculum = InitialCurriculum(config.env.dr, config.curriculum);
  const double dt = env_config->policy_dt();
  env.FixCommand({EvalCommandAt(config.eval, 0.0), 0.0, 0.0});
  env.Reset(curriculum);
  const Eigen::Vector3d start = env.state().trunk.position;

  const int steps = static_cast<int>(std::lround(config.eval.duration / dt));
  EvalResult result;
  result.samples.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    const double vx = EvalCommandAt(config.eval, k * dt);
    env.FixCommand({vx, 0.0, 0.0});
    // The planner signal the step composes with, before it advances.
    const JointVector signal = env.planner().Signal();
    const JointVector action = MlpForward(policy.actor, env.observation());
    const StepResult r = env.Step(action, curriculum);
    EvalSample s;
    s.time = (k + 1) * dt;
    s.command_vx = vx;
    s.state = env.state();
    s.planner_signal = signal;
    s.residual = action;
    s.termination = r.termination;
    result.samples.push_back(s);
  }
  result.summary = SummarizeEval(result.samples, start);
  return result;
}

EvalSummary SummarizeEval(const std::vector<EvalSample>& samples,
                          const Eigen::Vector3d& start_position) {
  EvalSummary s;
  s.steps = static_cast<int>(samples.size());
  if (samples.empty()) return s;
  MeanStd vx, h, pitch, roll;
  for (const auto& e : samples) {
    if (e.termination == Termination::kTrunkCollision) ++s.falls;
    const Eigen::Vector3d rpy = RollPitchYaw(e.state.trunk);
    vx.Add(BodyLinearVelocity(e.state.trunk).x());
    h.Add(e.state.trunk.position.z());
    pitch.Add(rpy.y());
    roll.Add(rpy.x());
  }
  s.mean_vx = vx.Mean();
  s.std_vx = vx.Std();
  s.mean_height = h.Mean();
  s.std_height = h.Std();
  s.mean_pitch = pitch.Mean();
  s.std_pitch = pitch.Std();
  s.mean_roll = roll.Mean();
  s.std_roll = roll.Std();
  s.displacement =
      (samples.back().state.trunk.position - start_position).head<2>().norm();
  std::array<std::vector<double>, kNumLegs> contacts;
  for (int l = 0; l < kNumLegs; ++l) {
    contacts[l] = ContactSeries(samples, l);
    std::vector<bool> flags(contacts[l].begin(), contacts[l].end());
    s.stance_fraction[l] = StanceFraction(flags);
  }
  const int fr = LegIndex(Leg::kFR), fl = LegIndex(Leg::kFL);
  const int rl = LegIndex(Leg::kRL), rr = LegIndex(Leg::kRR);
  s.lag_fr_rl = CircularCrossCorrelationPeakLag(contacts[fr], contacts[rl]);
  s.lag_fl_rr = CircularCrossCorrelationPeakLag(contacts[fl], contacts[rr]);
  s.lag_fr_fl = CircularCrossCorrelationPeakLag(contacts[fr], contacts[fl]);
  return s;
}

std::string EvalTraceCsvHeader() {
  std::string h =
      "t,command_vx,x,y,z,qw,qx,qy,qz,roll,pitch,yaw,vx_body,vy_body,vz_body,"
      "wx,wy,wz";
  for (const char* prefix : {"q", "qdot", "q_cpg", "residual"}) {
    for (int j = 0; j < kNumJoints; ++j) h += "," + std::string(prefix) + std::to_string(j);
  }
  for (Leg leg : kAllLegs) h += ",contact_" + std::string(LegName(leg));
  for (const char* frame : {"world", "body"}) {
    for (Leg leg : kAllLegs) {
      for (const char* axis : {"x", "y", "z"}) {
        h += ",foot_" + std::string(LegName(leg)) + "_" + frame + "_" + axis;
      }
    }
  }
  h += ",termination";
  return h;
}

void WriteEvalTraceCsv(const std::string& path, const EvalResult& result,
                       const RobotGeometry& robot) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out.precision(10);
  out << EvalTraceCsvHeader() << "\n";
  for (const auto& e : result.samples) {
    const TrunkState& t = e.state.trunk;
    const Eigen::Vector3d rpy = RollPitchYaw(t);
    const Eigen::Vector3d vb = BodyLinearVelocity(t);
    out << e.time << "," << e.command_vx << "," << t.position.x() << ","
        << t.position.y() << "," << t.position.z() << "," << t.orientation.w()
        << "," << t.orientation.x() << "," << t.orientation.y() << ","
        << t.orientation.z() << "," << rpy.x() << "," << rpy.y() << ","
        << rpy.z() << "," << vb.x() << "," << vb.y() << "," << vb.z() << ","
        << t.angular_velocity.x() << "," << t.angular_velocity.y() << ","
        << t.angular_velocity.z();
    for (const JointVector* v :
         {&e.state.q, &e.state.qdot, &e.planner_signal, &e.residual}) {
      for (int j = 0; j < kNumJoints; ++j) out << "," << (*v)[j];
    }
    for (int l = 0; l < kNumLegs; ++l) out << "," << (e.state.contacts[l] ? 1 : 0);
    const auto world = FootPositionsWorld(e.state, robot);
    const auto body = FootPositionsBody(e.state.q, robot);
    for (const auto* feet : {&world, &body}) {
      for (const auto& p : *feet) out << "," << p.x() << "," << p.y() << "," << p.z();
    }
    out << "," << TerminationName(e.termination) << "\n";
  }
  if (!out) throw SchemaError("failed writing " + path);
}

std::string EvalSummaryJson(const EvalSummary& s) {
  json j;
  j["steps"] = s.steps;
  j["falls"] = s.falls;
  j["velocity_mean"] = s.mean_vx;
  j["velocity_std"] = s.std_vx;
  j["height_mean"] = s.mean_height;
  j["height_std"] = s.std_height;
  j["pitch_mean"] = s.mean_pitch;
  j["pitch_std"] = s.std_pitch;
  j["roll_mean"] = s.mean_roll;
  j["roll_std"] = s.std_roll;
  j["displacement"] = s.displacement;
  j["stance_fraction"] = s.stance_fraction;
  j["contact_lag_fr_rl"] = s.lag_fr_rl;
  j["contact_lag_fl_rr"] = s.lag_fl_rr;
  j["contact_lag_fr_fl"] = s.lag_fr_fl;
  return j.dump(2) + "\n";
}

std::string GaitExportCsvHeader() {
  return "tick,t,leg,q_abduction,q_hip,q_knee,foot_x,foot_y,foot_z";
}

void WriteGaitExportCsv(const std::string& path, const GaitPlannerModel& model,
                        const RobotGeometry& robot, int num_periods) {
  const BaselineTrajectory b = SampleBaseline(model, robot, num_periods);
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out.precision(17);
  out << GaitExportCsvHeader() << "\n";
  const double tick = 1.0 / model.params.tick_rate;
  for (size_t k = 0; k < b.joints.size(); ++k) {
    for (Leg leg : kAllLegs) {
      const int l = LegIndex(leg);
      const LegAngles q = LegSegment(b.joints[k], leg);
      const Eigen::Vector3d& p = b.feet[k][l];
      out << k << "," << k * tick << "," << LegName(leg) << "," << q[0] << ","
          << q[1] << "," << q[2] << "," << p.x() << "," << p.y() << ","
          << p.z() << "\n";
    }
  }
  if (!out) throw SchemaError("failed writing " + path);
}

int CheckCsvSchema(const std::string& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw SchemaError(path + ": unexpected header");
  }
  const auto fields = [](const std::string& s) {
    return 1 + static_cast<int>(std::count(s.begin(), s.end(), ','));
  };
  const int columns = fields(header);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    if (fields(line) != columns) {
      throw SchemaError(path + ": row " + std::to_string(rows) + " has " +
                        std::to_string(fields(line)) + " fields, expected " +
                        std::to_string(columns));
    }
  }
  return rows;
}

}  // namespace synloco
