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

#ifndef SYNLOCO_TRAINER_H_
#define SYNLOCO_TRAINER_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "synloco/environment.h"
#include "synloco/gait_planner.h"
#include "synloco/randomization.h"
#include "synloco/rl.h"

namespace synloco {

struct TrainConfig {
  int num_envs = 64;
  int horizon = 24;
  int iterations = 300;
  int checkpoint_every = 50;  // 0 keeps only the final checkpoint
  int workers = 1;            // threads stepping environments
};

void ValidateTrainConfig(const TrainConfig& config);

struct IterationMetrics {
  int iteration = 0;
  double mean_reward = 0.0;  // per policy step
  std::array<double, kNumRewardTerms> term_means{};
  double tracking_fraction = 0.0;
  double mean_episode_length = 0.0;  // policy steps; 0 when none finished
  int64_t episodes = 0;
  int64_t collisions = 0;
  UpdateStats update;
  CurriculumState curriculum;
};

std::string MetricsCsvHeader();
std::string MetricsCsvRow(const IterationMetrics& m);

// PPO on a batch of environments around a frozen planner.
class Trainer {
 public:
  Trainer(std::shared_ptr<const EnvConfig> env_config,
          std::shared_ptr<const GaitPlannerModel> planner,
          const NetworkConfig& network, const PpoConfig& ppo,
          const CurriculumConfig& curriculum, const TrainConfig& train,
          uint64_t seed);

  // Collect one batch, update the policy and the curriculum.
  IterationMetrics RunIteration();

  int iteration() const { return iteration_; }
  const PolicyState& policy() const { return policy_; }
  const CurriculumState& curriculum() const { return curriculum_; }
  std::vector<LocomotionEnv>& envs() { return envs_; }

  // Everything needed to continue bit-identically. `header` is stored
  // verbatim (config text, hashes) and returned by ReadCheckpointHeader.
  void SaveCheckpoint(const std::string& path, const std::string& header) const;
  void LoadCheckpoint(const std::string& path);

 private:
  std::shared_ptr<const EnvConfig> env_config_;
  std::shared_ptr<const GaitPlannerModel> planner_;
  PpoConfig ppo_;
  CurriculumConfig curriculum_config_;
  TrainConfig train_;
  std::vector<LocomotionEnv> envs_;
  PolicyState policy_;
  AdamState adam_;
  CurriculumState curriculum_;
  Rng update_rng_;
  int iteration_ = 0;
};

// Policy and bookkeeping read back from a checkpoint without building
// environments, e.g. for evaluation.
struct CheckpointContents {
  std::string header;
  int iteration = 0;
  PolicyState policy;
};
CheckpointContents ReadCheckpoint(const std::string& path);

}  // namespace synloco

#endif  // SYNLOCO_TRAINER_H_
