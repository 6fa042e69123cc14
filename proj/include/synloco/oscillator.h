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

#ifndef SYNLOCO_OSCILLATOR_H_
#define SYNLOCO_OSCILLATOR_H_

#include <numbers>
#include <vector>

namespace synloco {

// Two-neuron SO(2) oscillator parameters. The recurrent weight matrix is
// (1 + alpha) * R(phi); a gain marginally above one gives a stable limit
// cycle under tanh saturation.
struct OscillatorParams {
  double phi = std::numbers::pi / 60.0;  // rad per tick
  double alpha = 0.01;                   // gain offset
  double tick_rate = 200.0;              // Hz

  double gain() const { return 1.0 + alpha; }
};

// Throws InvalidParams when phi is outside (0, pi) or tick_rate <= 0.
// alpha is not checked here; a gain <= 1 is reported by FindLimitCycle.
void ValidateOscillatorParams(const OscillatorParams& params);

struct OscillatorState {
  double o0 = 0.0;
  double o1 = 0.0;

  double Amplitude() const;
  bool operator==(const OscillatorState&) const = default;
};

// One period of the limit cycle, sampled at integer ticks starting at a
// positive-going zero crossing of o1.
struct PeriodicOrbit {
  std::vector<OscillatorState> samples;
  int period_ticks = 0;
  // Largest per-component gap between samples[0] and the state one tick
  // after samples.back().
  double closure_error = 0.0;

  // Frequency of the rhythm in Hz for the given tick rate.
  double Frequency(double tick_rate) const {
    return tick_rate / period_ticks;
  }
};

// Fixed seed state used for the limit cycle search.
inline constexpr OscillatorState kLimitCycleSeed{0.2, 0.0};
inline constexpr int kMinBurnInTicks = 5000;
// Amplitude below which the oscillator is considered to have died out.
inline constexpr double kMinOscillationAmplitude = 1e-4;

// tanh((1 + alpha) * R(phi) * o), elementwise.
OscillatorState StepOscillator(const OscillatorState& state,
                               const OscillatorParams& params);

// Runs StepOscillator `ticks` times.
OscillatorState AdvanceOscillator(OscillatorState state,
                                  const OscillatorParams& params, int ticks);

// Iterates from kLimitCycleSeed, discards burn_in_ticks and returns the
// samples between two consecutive positive-going zero crossings of o1.
// Throws NoOscillation if the amplitude has decayed below
// kMinOscillationAmplitude and PeriodNotFound if no two crossings occur
// within 10 * 2*pi/phi ticks.
PeriodicOrbit FindLimitCycle(const OscillatorParams& params,
                             int burn_in_ticks = kMinBurnInTicks);

}  // namespace synloco

#endif  // SYNLOCO_OSCILLATOR_H_
