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

#ifndef SYNLOCO_RANDOMIZATION_H_
#define SYNLOCO_RANDOMIZATION_H_

#include <optional>
#include <random>

#include <Eigen/Core>

#include "synloco/simulator.h"
#include "synloco/task.h"

namespace synloco {

using Rng = std::mt19937_64;

// Independent stream for environment `index` under `master_seed`.
Rng MakeStreamRng(uint64_t master_seed, uint64_t index);

struct Range {
  double low = 0.0;
  double high = 0.0;
};

// U(low, high); returns low exactly for zero-width ranges.
double SampleUniform(Rng& rng, const Range& range);

struct RandomizationConfig {
  Range mass_offset{-1.0, 1.0};  // kg
  Range friction{0.5, 1.25};
  Range impulse_magnitude{-1.8, 1.8};  // m/s
  double impulse_interval = 15.0;      // s, initial value
  // Half-widths of the additive uniform sensor noise, physical units.
  double angular_velocity_noise = 0.05;  // rad/s
  double gravity_noise = 0.05;
  double joint_position_noise = 0.01;    // rad
  double joint_velocity_noise = 0.075;   // rad/s
};

void ValidateRandomizationConfig(const RandomizationConfig& config);

struct CommandConfig {
  Range vx{-1.0, 1.0};
  Range vy{-1.0, 1.0};
  Range wz{-1.0, 1.0};
  double resample_interval = 10.0;  // s
};

void ValidateCommandConfig(const CommandConfig& config);

struct CurriculumConfig {
  double threshold = 0.8;
  double interval_factor = 0.9;
  double cap_factor = 1.1;
  double interval_floor = 5.0;  // s
  double initial_cap = 1.0;     // m/s
  double cap_ceiling = 1.8;     // m/s
  double ema_decay = 0.99;
};

void ValidateCurriculumConfig(const CurriculumConfig& config);

struct CurriculumState {
  double impulse_interval = 15.0;
  double impulse_mag_cap = 1.0;
  double tracking_reward_ema = 0.0;
};

CurriculumState InitialCurriculum(const RandomizationConfig& dr,
                                  const CurriculumConfig& config);

// Mass offset and friction drawn once per episode.
EnvParams SampleEnvParams(Rng& rng, const RandomizationConfig& config,
                          const EnvParams& base);

// True when `t` lies on a multiple of `interval` (to 1e-9 s).
bool OnMultiple(double t, double interval);

// Resamples every component at multiples of the resample interval and
// returns `current` otherwise.
Command SampleCommand(Rng& rng, double t, const Command& current,
                      const CommandConfig& config = {});

// Uniform noise added to the angular velocity, gravity, joint position and
// joint velocity slots. Noise is drawn in physical units and then scaled
// like the slot it lands in.
Observation AddSensorNoise(const Observation& obs, Rng& rng,
                           const RandomizationConfig& config,
                           const ObservationScales& scales = {});

// `fraction` is the mean linear-velocity tracking reward over its per-step
// maximum.
CurriculumState CurriculumUpdate(const CurriculumState& cur, double fraction,
                                 const CurriculumConfig& config = {});

// Emits a horizontal velocity change when (t_prev, t] crosses a multiple of
// the current impulse interval.
std::optional<Eigen::Vector2d> ScheduleImpulse(Rng& rng, double t_prev,
                                               double t,
                                               const CurriculumState& cur);

}  // namespace synloco

#endif  // SYNLOCO_RANDOMIZATION_H_
