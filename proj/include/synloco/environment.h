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

#ifndef SYNLOCO_ENVIRONMENT_H_
#define SYNLOCO_ENVIRONMENT_H_

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "synloco/gait_planner.h"
#include "synloco/randomization.h"
#include "synloco/rl.h"
#include "synloco/simulator.h"
#include "synloco/task.h"

namespace synloco {

struct EnvConfig {
  SimConfig sim;
  EnvParams physics;  // base values before randomization
  RandomizationConfig dr;
  CommandConfig command;
  RewardWeights reward;
  ObservationScales scales;
  double residual_limit = 0.6;  // rad
  double filter_alpha = 0.7;
  double stand_height = 0.32;  // nominal pose
  double spawn_height = 0.35;  // trunk height at reset
  int substeps = 4;            // physics steps per policy step
  bool randomize_dynamics = true;
  bool sensor_noise = true;
  bool impulses = true;

  double policy_dt() const { return substeps * sim.dt; }
};

void ValidateEnvConfig(const EnvConfig& config);

struct StepResult {
  RewardBreakdown reward;
  Termination termination = Termination::kRunning;
  bool done = false;
  int episode_steps = 0;  // length of the episode that just ended
};

// One simulated robot driven by the frozen planner plus a residual policy
// at the policy rate. Owns its state and random stream.
class LocomotionEnv {
 public:
  LocomotionEnv(std::shared_ptr<const EnvConfig> config,
                std::shared_ptr<const GaitPlannerModel> planner, Rng rng);

  // New episode: dynamics and command resampled, robot dropped from the
  // spawn height in the nominal pose, rhythm restarted.
  void Reset(const CurriculumState& curriculum);

  // Observation of the current state, drawn (with sensor noise when
  // enabled) at the end of the last reset or step.
  const Observation& observation() const { return observation_; }

  // Applies the residual `action`; resets the episode when it terminates.
  StepResult Step(const JointVector& action, const CurriculumState& curriculum);

  // Pins the command; it is no longer resampled.
  void FixCommand(const Command& cmd);
  void ReleaseCommand() { command_fixed_ = false; }

  const RobotState& state() const { return state_; }
  const Command& command() const { return command_; }
  const EnvParams& params() const { return params_; }
  const GaitPlanner& planner() const { return planner_; }
  const JointVector& last_action() const { return last_action_; }
  const JointVector& nominal() const { return nominal_; }
  const EnvConfig& config() const { return *config_; }
  int64_t episode_steps() const { return episode_steps_; }
  Rng& rng() { return rng_; }

  // Full mutable state, used for checkpointing.
  struct Snapshot {
    RobotState state;
    EnvParams params;
    OscillatorState planner;
    Command command;
    bool command_fixed = false;
    JointVector last_action = JointVector::Zero();
    int64_t episode_steps = 0;
    Observation observation = Observation::Zero();
    Rng rng;
  };
  Snapshot Save() const;
  void Restore(const Snapshot& snapshot);

 private:
  double EpisodeTime() const { return episode_steps_ * config_->policy_dt(); }
  void UpdateObservation();

  std::shared_ptr<const EnvConfig> config_;
  GaitPlanner planner_;
  JointVector nominal_;
  Rng rng_;
  RobotState state_;
  EnvParams params_;
  Command command_;
  bool command_fixed_ = false;
  JointVector last_action_ = JointVector::Zero();
  int64_t episode_steps_ = 0;
  Observation observation_ = Observation::Zero();
};

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index must
// touch only its own data.
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

// Totals gathered while collecting one batch.
struct RolloutStats {
  std::array<double, kNumRewardTerms> weighted_sum{};
  double tracking_raw_sum = 0.0;  // unweighted linear-velocity tracking
  double total_sum = 0.0;
  int64_t steps = 0;
  int64_t episodes = 0;
  int64_t episode_steps_sum = 0;
  int64_t collisions = 0;

  double TrackingFraction() const {
    return steps > 0 ? tracking_raw_sum / static_cast<double>(steps) : 0.0;
  }
};

// Steps every environment `buffer.horizon` times with actions drawn from
// the policy, recording transitions, and fills the bootstrap values.
// Divergence is rethrown with the environment index.
RolloutStats CollectRollouts(std::vector<LocomotionEnv>& envs,
                             const PolicyState& policy,
                             const CurriculumState& curriculum, int horizon,
                             int workers, RolloutBuffer& buffer);

}  // namespace synloco

#endif  // SYNLOCO_ENVIRONMENT_H_
