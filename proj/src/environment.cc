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

#include "synloco/environment.h"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "synloco/errors.h"

namespace synloco {

void ValidateEnvConfig(const EnvConfig& c) {
  ValidateEnvParams(c.physics);
  ValidateRandomizationConfig(c.dr);
  ValidateCommandConfig(c.command);
  if (!(c.sim.dt > 0.0)) throw InvalidParams("sim dt must be > 0");
  if (!(c.sim.kp >= 0.0 && c.sim.kd >= 0.0 && c.sim.torque_limit > 0.0)) {
    throw InvalidParams("PD gains must be >= 0 and the torque limit > 0");
  }
  if (!(c.sim.reflected_inertia > 0.0)) {
    throw InvalidParams("reflected inertia must be > 0");
  }
  if (!(c.sim.max_episode_time > 0.0)) {
    throw InvalidParams("episode length must be > 0");
  }
  if (c.substeps < 1) throw InvalidParams("substeps must be >= 1");
  if (!(c.filter_alpha > 0.0 && c.filter_alpha <= 1.0)) {
    throw InvalidParams("filter alpha must be in (0, 1]");
  }
  if (!(c.residual_limit >= 0.0)) {
    throw InvalidParams("residual limit must be >= 0");
  }
  if (!(c.stand_height > 0.0 && c.stand_height < c.sim.robot.thigh_length +
                                                    c.sim.robot.calf_length)) {
    throw InvalidParams("stand height must be inside the leg reach");
  }
  if (!(c.spawn_height >= c.stand_height)) {
    throw InvalidParams("spawn height must be >= stand height");
  }
  if (!(c.physics.trunk_mass + c.dr.mass_offset.low > 0.0)) {
    throw InvalidParams("randomized trunk mass must stay > 0");
  }
  if (!(c.reward.tracking_sigma > 0.0 && c.reward.height_sigma > 0.0 &&
        c.reward.foot_position_sigma > 0.0)) {
    throw InvalidParams("reward kernel widths must be > 0");
  }
}

LocomotionEnv::LocomotionEnv(std::shared_ptr<const EnvConfig> config,
                             std::shared_ptr<const GaitPlannerModel> planner,
                             Rng rng)
    : config_(std::move(config)),
      planner_(std::move(planner)),
      nominal_(NominalJointAngles(config_->sim.robot, config_->stand_height)),
      rng_(std::move(rng)),
      params_(config_->physics) {}

void LocomotionEnv::Reset(const CurriculumState& /*curriculum*/) {
  const EnvConfig& c = *config_;
  params_ = c.randomize_dynamics ? SampleEnvParams(rng_, c.dr, c.physics)
                                 : c.physics;
  episode_steps_ = 0;
  if (!command_fixed_) command_ = SampleCommand(rng_, 0.0, command_, c.command);
  planner_.Reset();
  state_ = StandingState(c.sim, c.stand_height, c.spawn_height);
  state_.filter_mem = planner_.Signal();
  last_action_.setZero();
  UpdateObservation();
}

void LocomotionEnv::FixCommand(const Command& cmd) {
  command_ = cmd;
  command_fixed_ = true;
}

void LocomotionEnv::UpdateObservation() {
  observation_ = BuildObservation(state_, command_, planner_.Signal(),
                                  last_action_, nominal_, config_->scales);
  if (config_->sensor_noise) {
    observation_ = AddSensorNoise(observation_, rng_, config_->dr,
                                  config_->scales);
  }
}

StepResult LocomotionEnv::Step(const JointVector& action,
                               const CurriculumState& curriculum) {
  const EnvConfig& c = *config_;
  const RobotState prev = state_;
  const double t_prev = EpisodeTime();

  const JointVector target =
      ComposeAction(planner_.Signal(), action, c.residual_limit);
  state_.filter_mem = LowPass(target, state_.filter_mem, c.filter_alpha);
  std::array<double, 4 * kNumLegs> touchdowns{};
  int num_touchdowns = 0;
  for (int k = 0; k < c.substeps; ++k) {
    state_ = StepPhysics(state_, state_.filter_mem, params_, c.sim);
    planner_.Advance(1);
    for (int l = 0; l < kNumLegs; ++l) {
      if (!state_.touchdown[l]) continue;
      if (num_touchdowns < static_cast<int>(touchdowns.size())) {
        touchdowns[num_touchdowns++] = state_.touchdown_air_time[l];
      }
    }
  }
  ++episode_steps_;
  const double t = EpisodeTime();
  if (c.impulses) {
    if (auto dv = ScheduleImpulse(rng_, t_prev, t, curriculum)) {
      state_ = ApplyImpulse(state_, *dv, curriculum.impulse_mag_cap);
    }
  }

  RewardInputs in;
  in.prev = &prev;
  in.cur = &state_;
  in.cmd = command_;
  in.action = action;
  in.prev_action = last_action_;
  in.desired_feet = FootPositionsBody(planner_.Signal(), c.sim.robot);
  in.touchdown_air_times = std::span<const double>(
      touchdowns.data(), static_cast<size_t>(num_touchdowns));
  in.dt = c.policy_dt();

  StepResult result;
  result.reward = ComputeReward(in, c.sim.robot, c.reward);
  last_action_ = action;

  result.termination = CheckTermination(state_, params_.terrain, c.sim);
  if (result.termination != Termination::kRunning) {
    result.done = true;
    result.episode_steps = static_cast<int>(episode_steps_);
    Reset(curriculum);
    return result;
  }
  if (!command_fixed_) command_ = SampleCommand(rng_, t, command_, c.command);
  UpdateObservation();
  return result;
}

LocomotionEnv::Snapshot LocomotionEnv::Save() const {
  Snapshot s;
  s.state = state_;
  s.params = params_;
  s.planner = planner_.state();
  s.command = command_;
  s.command_fixed = command_fixed_;
  s.last_action = last_action_;
  s.episode_steps = episode_steps_;
  s.observation = observation_;
  s.rng = rng_;
  return s;
}

void LocomotionEnv::Restore(const Snapshot& s) {
  state_ = s.state;
  params_ = s.params;
  planner_.set_state(s.planner);
  command_ = s.command;
  command_fixed_ = s.command_fixed;
  last_action_ = s.last_action;
  episode_steps_ = s.episode_steps;
  observation_ = s.observation;
  rng_ = s.rng;
}

void ParallelFor(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RolloutStats CollectRollouts(std::vector<LocomotionEnv>& envs,
                             const PolicyState& policy,
                             const CurriculumState& curriculum, int horizon,
                             int workers, RolloutBuffer& buffer) {
  const int n = static_cast<int>(envs.size());
  const int act_size = policy.actor.output_size();
  buffer.Resize(n, horizon, kObservationSize, act_size);
  RolloutStats stats;
  Eigen::MatrixXd obs(kObservationSize, n);
  std::vector<StepResult> results(n);
  std::vector<std::exception_ptr> failures(n);

  for (int t = 0; t < horizon; ++t) {
    for (int e = 0; e < n; ++e) obs.col(e) = envs[e].observation();
    const Eigen::MatrixXd mean = MlpForwardBatch(policy.actor, obs);
    const Eigen::MatrixXd value = MlpForwardBatch(policy.critic, obs);
    ParallelFor(n, workers, [&](int e) {
      try {
        const ActionSample a =
            SampleGaussian(mean.col(e), policy.log_std, envs[e].rng(), false);
        const int i = buffer.Index(t, e);
        buffer.observations.col(i) = obs.col(e);
        buffer.actions.col(i) = a.action;
        buffer.log_probs[i] = a.log_prob;
        buffer.values[i] = value(0, e);
        results[e] = envs[e].Step(a.action, curriculum);
        buffer.rewards[i] = results[e].reward.total;
        buffer.dones[i] = results[e].done ? 1.0 : 0.0;
      } catch (...) {
        failures[e] = std::current_exception();
      }
    });
    for (int e = 0; e < n; ++e) {
      if (!failures[e]) continue;
      try {
        std::rethrow_exception(failures[e]);
      } catch (const NumericalDivergence& err) {
        throw NumericalDivergence(
            "environment " + std::to_string(e) + ": " + err.what(), e);
      }
    }
    for (int e = 0; e < n; ++e) {
      const StepResult& r = results[e];
      for (int k = 0; k < kNumRewardTerms; ++k) {
        stats.weighted_sum[k] += r.reward.weighted[k];
      }
      stats.tracking_raw_sum += r.reward.raw[kLinearVelocityTracking];
      stats.total_sum += r.reward.total;
      ++stats.steps;
      if (r.done) {
        ++stats.episodes;
        stats.episode_steps_sum += r.episode_steps;
        if (r.termination == Termination::kTrunkCollision) ++stats.collisions;
      }
    }
  }
  for (int e = 0; e < n; ++e) obs.col(e) = envs[e].observation();
  const Eigen::MatrixXd bootstrap = MlpForwardBatch(policy.critic, obs);
  buffer.bootstrap_values = bootstrap.row(0).transpose();
  return stats;
}

}  // namespace synloco
