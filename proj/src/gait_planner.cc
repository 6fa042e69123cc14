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
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "synloco/errors.h"

namespace synloco {

using nlohmann::json;

std::vector<OscillatorState> SampleRbfCenters(const PeriodicOrbit& orbit,
                                              int num_centers) {
  if (num_centers < 1) throw InvalidParams("RBF layer needs at least 1 center");
  if (num_centers > orbit.period_ticks) {
    throw TooManyCenters(std::to_string(num_centers) +
                         " centers requested on an orbit of " +
                         std::to_string(orbit.period_ticks) + " samples");
  }
  std::vector<OscillatorState> centers;
  centers.reserve(num_centers);
  for (int h = 0; h < num_centers; ++h) {
    const long index = static_cast<long>(h) * orbit.period_ticks / num_centers;
    centers.push_back(orbit.samples[index]);
  }
  return centers;
}

Eigen::VectorXd RbfActivations(const OscillatorState& state,
                               const RbfLayer& rbf) {
  const double inv_var = 1.0 / (rbf.sigma * rbf.sigma);
  Eigen::VectorXd out(rbf.size());
  for (int h = 0; h < rbf.size(); ++h) {
    const double d0 = state.o0 - rbf.centers[h].o0;
    const double d1 = state.o1 - rbf.centers[h].o1;
    out[h] = std::exp(-(d0 * d0 + d1 * d1) * inv_var);
  }
  return out;
}

JointVector PlannerForward(const OscillatorState& state,
                           const GaitPlannerModel& model) {
  return model.motor.weights.transpose() * RbfActivations(state, model.rbf) +
         model.motor.bias;
}

GaitPlannerModel BuildGaitPlanner(const OscillatorParams& params,
                                  int num_centers, double sigma,
                                  const JointVector& bias, int burn_in_ticks) {
  if (!(sigma > 0.0)) throw InvalidParams("RBF sigma must be positive");
  GaitPlannerModel model;
  model.params = params;
  model.orbit = FindLimitCycle(params, burn_in_ticks);
  model.rbf.centers = SampleRbfCenters(model.orbit, num_centers);
  model.rbf.sigma = sigma;
  model.motor.weights = Eigen::MatrixXd::Zero(num_centers, kNumJoints);
  model.motor.bias = bias;
  return model;
}

void ValidateGaitPlannerModel(const GaitPlannerModel& model) {
  ValidateOscillatorParams(model.params);
  const auto& orbit = model.orbit;
  if (orbit.period_ticks < 1 ||
      static_cast<int>(orbit.samples.size()) != orbit.period_ticks) {
    throw InvalidParams("orbit sample count does not match its period");
  }
  if (model.rbf.size() < 1 || !(model.rbf.sigma > 0.0)) {
    throw InvalidParams("RBF layer needs H >= 1 and sigma > 0");
  }
  if (SampleRbfCenters(orbit, model.rbf.size()) != model.rbf.centers) {
    throw InvalidParams("RBF centers are not uniformly spaced orbit samples");
  }
  if (model.motor.weights.rows() != model.rbf.size() ||
      model.motor.weights.cols() != kNumJoints) {
    throw InvalidParams("motor weights must be H x 12");
  }
  if (!model.motor.weights.allFinite() || !model.motor.bias.allFinite()) {
    throw InvalidParams("motor layer has non-finite entries");
  }
}

GaitPlanner::GaitPlanner(std::shared_ptr<const GaitPlannerModel> model)
    : model_(std::move(model)) {
  Reset();
}

void GaitPlanner::Reset() { state_ = model_->orbit.samples.front(); }

void GaitPlanner::Advance(int ticks) {
  state_ = AdvanceOscillator(state_, model_->params, ticks);
}

BaselineTrajectory SampleBaseline(const GaitPlannerModel& model,
                                  const RobotGeometry& robot,
                                  int num_periods) {
  BaselineTrajectory out;
  const int period = model.orbit.period_ticks;
  out.joints.reserve(static_cast<size_t>(period) * num_periods);
  out.feet.reserve(out.joints.capacity());
  for (int k = 0; k < period * num_periods; ++k) {
    const JointVector q = PlannerForward(model.orbit.samples[k % period], model);
    std::array<Eigen::Vector3d, kNumLegs> feet;
    for (Leg leg : kAllLegs) {
      feet[LegIndex(leg)] =
          ForwardKinematics(LegSegment(q, leg), robot.ForLeg(leg));
    }
    out.joints.push_back(q);
    out.feet.push_back(feet);
  }
  return out;
}

std::array<double, kNumLegs> BaselineClearance(const GaitPlannerModel& model,
                                               const RobotGeometry& robot) {
  const BaselineTrajectory traj = SampleBaseline(model, robot, 1);
  std::array<double, kNumLegs> clearance{};
  for (int l = 0; l < kNumLegs; ++l) {
    double lo = traj.feet.front()[l].z();
    double hi = lo;
    for (const auto& feet : traj.feet) {
      lo = std::min(lo, feet[l].z());
      hi = std::max(hi, feet[l].z());
    }
    clearance[l] = hi - lo;
  }
  return clearance;
}

namespace {

constexpr const char* kModelFormat = "synloco-gait-planner";
constexpr int kModelVersion = 1;

json StateToJson(const OscillatorState& s) { return json::array({s.o0, s.o1}); }

OscillatorState StateFromJson(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string GaitPlannerModelToString(const GaitPlannerModel& model,
                                     const RobotGeometry& robot) {
  json doc;
  doc["format"] = kModelFormat;
  doc["version"] = kModelVersion;
  doc["cpg"] = {{"phi", model.params.phi},
                {"alpha", model.params.alpha},
                {"tick_rate", model.params.tick_rate}};
  json samples = json::array();
  for (const auto& s : model.orbit.samples) samples.push_back(StateToJson(s));
  doc["orbit"] = {{"period_ticks", model.orbit.period_ticks},
                  {"closure_error", model.orbit.closure_error},
                  {"samples", samples}};
  json centers = json::array();
  for (const auto& c : model.rbf.centers) centers.push_back(StateToJson(c));
  doc["rbf"] = {{"sigma", model.rbf.sigma}, {"centers", centers}};
  json weights = json::array();
  for (int h = 0; h < model.motor.weights.rows(); ++h) {
    json row = json::array();
    for (int j = 0; j < kNumJoints; ++j) row.push_back(model.motor.weights(h, j));
    weights.push_back(row);
  }
  json bias = json::array();
  for (int j = 0; j < kNumJoints; ++j) bias.push_back(model.motor.bias[j]);
  doc["motor"] = {{"weights", weights}, {"bias", bias}};
  doc["geometry"] = {{"hip_offset", robot.hip_offset},
                     {"thigh_length", robot.thigh_length},
                     {"calf_length", robot.calf_length},
                     {"hip_mount_x", robot.hip_mount_x},
                     {"hip_mount_y", robot.hip_mount_y}};
  return doc.dump(1) + "\n";
}

void SaveGaitPlannerModel(const std::string& path,
                          const GaitPlannerModel& model,
                          const RobotGeometry& robot) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path);
  out << GaitPlannerModelToString(model, robot);
  if (!out) throw Error("failed writing model file " + path);
}

GaitPlannerModel GaitPlannerModelFromString(const std::string& text,
                                            const std::string& path,
                                            RobotGeometry* robot) {
  GaitPlannerModel model;
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != kModelFormat) {
      throw SchemaError(path + " is not a gait planner model");
    }
    if (doc.at("version").get<int>() != kModelVersion) {
      throw SchemaError(path + ": unsupported model version");
    }
    const json& cpg = doc.at("cpg");
    model.params.phi = cpg.at("phi").get<double>();
    model.params.alpha = cpg.at("alpha").get<double>();
    model.params.tick_rate = cpg.at("tick_rate").get<double>();
    const json& orbit = doc.at("orbit");
    model.orbit.period_ticks = orbit.at("period_ticks").get<int>();
    model.orbit.closure_error = orbit.at("closure_error").get<double>();
    for (const auto& s : orbit.at("samples")) {
      model.orbit.samples.push_back(StateFromJson(s));
    }
    model.rbf.sigma = doc.at("rbf").at("sigma").get<double>();
    for (const auto& c : doc.at("rbf").at("centers")) {
      model.rbf.centers.push_back(StateFromJson(c));
    }
    const json& weights = doc.at("motor").at("weights");
    model.motor.weights.resize(static_cast<Eigen::Index>(weights.size()),
                               kNumJoints);
    for (size_t h = 0; h < weights.size(); ++h) {
      if (weights[h].size() != kNumJoints) {
        throw SchemaError(path + ": motor weight rows must have 12 entries");
      }
      for (int j = 0; j < kNumJoints; ++j) {
        model.motor.weights(static_cast<Eigen::Index>(h), j) =
            weights[h][j].get<double>();
      }
    }
    const json& bias = doc.at("motor").at("bias");
    if (bias.size() != kNumJoints) {
      throw SchemaError(path + ": motor bias must have 12 entries");
    }
    for (int j = 0; j < kNumJoints; ++j) model.motor.bias[j] = bias[j].get<double>();
    if (robot != nullptr) {
      const json& g = doc.at("geometry");
      robot->hip_offset = g.at("hip_offset").get<double>();
      robot->thigh_length = g.at("thigh_length").get<double>();
      robot->calf_length = g.at("calf_length").get<double>();
      robot->hip_mount_x = g.at("hip_mount_x").get<double>();
      robot->hip_mount_y = g.at("hip_mount_y").get<double>();
    }
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  ValidateGaitPlannerModel(model);
  return model;
}

GaitPlannerModel LoadGaitPlannerModel(const std::string& path,
                                      RobotGeometry* robot) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path);
  std::stringstream text;
  text << in.rdbuf();
  return GaitPlannerModelFromString(text.str(), path, robot);
}

}  // namespace synloco
