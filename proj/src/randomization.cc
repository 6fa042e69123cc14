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

#include "synloco/randomization.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "synloco/errors.h"

namespace synloco {

Rng MakeStreamRng(uint64_t master_seed, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(master_seed),
                    static_cast<uint32_t>(master_seed >> 32),
                    static_cast<uint32_t>(index),
                    static_cast<uint32_t>(index >> 32), 0x5f3759dfu};
  return Rng(seq);
}

double SampleUniform(Rng& rng, const Range& range) {
  if (range.high == range.low) return range.low;
  return std::uniform_real_distribution<double>(range.low, range.high)(rng);
}

namespace {

void CheckRange(const Range& r, const char* name) {
  if (!(std::isfinite(r.low) && std::isfinite(r.high) && r.low <= r.high)) {
    throw InvalidParams(std::string(name) + " range must satisfy low <= high");
  }
}

void CheckNonNegative(double v, const char* name) {
  if (!(v >= 0.0)) throw InvalidParams(std::string(name) + " must be >= 0");
}

}  // namespace

void ValidateRandomizationConfig(const RandomizationConfig& c) {
  CheckRange(c.mass_offset, "mass offset");
  CheckRange(c.friction, "friction");
  CheckRange(c.impulse_magnitude, "impulse magnitude");
  if (c.friction.low < 0.0) throw InvalidParams("friction must be >= 0");
  if (!(c.impulse_interval > 0.0)) {
    throw InvalidParams("impulse interval must be > 0");
  }
  CheckNonNegative(c.angular_velocity_noise, "angular velocity noise");
  CheckNonNegative(c.gravity_noise, "gravity noise");
  CheckNonNegative(c.joint_position_noise, "joint position noise");
  CheckNonNegative(c.joint_velocity_noise, "joint velocity noise");
}

void ValidateCommandConfig(const CommandConfig& c) {
  CheckRange(c.vx, "command vx");
  CheckRange(c.vy, "command vy");
  CheckRange(c.wz, "command wz");
  if (!(c.resample_interval > 0.0)) {
    throw InvalidParams("command resample interval must be > 0");
  }
}

void ValidateCurriculumConfig(const CurriculumConfig& c) {
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
    throw InvalidParams("curriculum threshold must be in [0, 1]");
  }
  if (!(c.interval_factor > 0.0 && c.interval_factor <= 1.0)) {
    throw InvalidParams("interval factor must be in (0, 1]");
  }
  if (!(c.cap_factor >= 1.0)) throw InvalidParams("cap factor must be >= 1");
  if (!(c.interval_floor > 0.0)) {
    throw InvalidParams("interval floor must be > 0");
  }
  if (!(c.initial_cap >= 0.0 && c.initial_cap <= c.cap_ceiling)) {
    throw InvalidParams("initial impulse cap must be in [0, ceiling]");
  }
  if (!(c.ema_decay >= 0.0 && c.ema_decay <= 1.0)) {
    throw InvalidParams("ema decay must be in [0, 1]");
  }
}

CurriculumState InitialCurriculum(const RandomizationConfig& dr,
                                  const CurriculumConfig& config) {
  CurriculumState s;
  s.impulse_interval = std::max(dr.impulse_interval, config.interval_floor);
  s.impulse_mag_cap = config.initial_cap;
  return s;
}

EnvParams SampleEnvParams(Rng& rng, const RandomizationConfig& config,
                          const EnvParams& base) {
  EnvParams p = base;
  p.trunk_mass = base.trunk_mass + SampleUniform(rng, config.mass_offset);
  p.friction = SampleUniform(rng, config.friction);
  return p;
}

bool OnMultiple(double t, double interval) {
  const double k = std::round(t / interval);
  return std::abs(t - k * interval) <= 1e-9;
}

Command SampleCommand(Rng& rng, double t, const Command& current,
                      const CommandConfig& config) {
  if (t < 0.0) throw InvalidParams("command time must be >= 0");
  if (!OnMultiple(t, config.resample_interval)) return current;
  Command c;
  c.vx = SampleUniform(rng, config.vx);
  c.vy = SampleUniform(rng, config.vy);
  c.wz = SampleUniform(rng, config.wz);
  return c;
}

Observation AddSensorNoise(const Observation& obs, Rng& rng,
                           const RandomizationConfig& config,
                           const ObservationScales& scales) {
  Observation out = obs;
  auto perturb = [&](int offset, int count, double half_width, double scale) {
    if (half_width == 0.0) return;
    for (int i = 0; i < count; ++i) {
      out[offset + i] +=
          scale * SampleUniform(rng, Range{-half_width, half_width});
    }
  };
  perturb(kObsAngularVelocity, 3, config.angular_velocity_noise,
          scales.angular);
  perturb(kObsGravity, 3, config.gravity_noise, 1.0);
  perturb(kObsJointPosition, kNumJoints, config.joint_position_noise, 1.0);
  perturb(kObsJointVelocity, kNumJoints, config.joint_velocity_noise,
          scales.joint_velocity);
  return out;
}

CurriculumState CurriculumUpdate(const CurriculumState& cur, double fraction,
                                 const CurriculumConfig& config) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidParams("tracking fraction must be in [0, 1]");
  }
  CurriculumState next = cur;
  next.tracking_reward_ema =
      config.ema_decay * cur.tracking_reward_ema +
      (1.0 - config.ema_decay) * fraction;
  if (fraction >= config.threshold) {
    next.impulse_interval = std::max(cur.impulse_interval * config.interval_factor,
                                     config.interval_floor);
    next.impulse_mag_cap =
        std::min(cur.impulse_mag_cap * config.cap_factor, config.cap_ceiling);
  }
  return next;
}

std::optional<Eigen::Vector2d> ScheduleImpulse(Rng& rng, double t_prev,
                                               double t,
                                               const CurriculumState& cur) {
  if (t < 0.0) throw InvalidParams("impulse time must be >= 0");
  const double interval = cur.impulse_interval;
  // Boundaries are compared with a small slack so that accumulated step
  // times land on the multiple they were meant to hit.
  const double eps = 1e-9;
  if (std::floor((t + eps) / interval) <= std::floor((t_prev + eps) / interval)) {
    return std::nullopt;
  }
  const double cap = cur.impulse_mag_cap;
  return Eigen::Vector2d(SampleUniform(rng, Range{-cap, cap}),
                         SampleUniform(rng, Range{-cap, cap}));
}

}  // namespace synloco
