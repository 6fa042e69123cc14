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

#include "synloco/oscillator.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "synloco/errors.h"

namespace synloco {

void ValidateOscillatorParams(const OscillatorParams& params) {
  if (!(params.phi > 0.0 && params.phi < std::numbers::pi)) {
    throw InvalidParams("cpg.phi must lie in (0, pi), got " +
                        std::to_string(params.phi));
  }
  if (!(params.tick_rate > 0.0)) {
    throw InvalidParams("cpg.tick_rate must be positive");
  }
  if (!std::isfinite(params.alpha)) {
    throw InvalidParams("cpg.alpha must be finite");
  }
}

double OscillatorState::Amplitude() const { return std::hypot(o0, o1); }

OscillatorState StepOscillator(const OscillatorState& state,
                               const OscillatorParams& params) {
  const double c = std::cos(params.phi);
  const double s = std::sin(params.phi);
  const double g = params.gain();
  return {std::tanh(g * (c * state.o0 + s * state.o1)),
          std::tanh(g * (-s * state.o0 + c * state.o1))};
}

OscillatorState AdvanceOscillator(OscillatorState state,
                                  const OscillatorParams& params, int ticks) {
  for (int i = 0; i < ticks; ++i) state = StepOscillator(state, params);
  return state;
}

PeriodicOrbit FindLimitCycle(const OscillatorParams& params,
                             int burn_in_ticks) {
  ValidateOscillatorParams(params);
  if (burn_in_ticks < kMinBurnInTicks) {
    throw InvalidParams("burn-in must be at least " +
                        std::to_string(kMinBurnInTicks) + " ticks");
  }
  OscillatorState state = AdvanceOscillator(kLimitCycleSeed, params,
                                            burn_in_ticks);
  if (state.Amplitude() < kMinOscillationAmplitude) {
    throw NoOscillation("oscillator amplitude " +
                        std::to_string(state.Amplitude()) +
                        " after burn-in; gain " +
                        std::to_string(params.gain()) + " does not sustain a "
                        "limit cycle");
  }

  const int search_limit =
      static_cast<int>(std::ceil(10.0 * 2.0 * std::numbers::pi / params.phi));
  std::vector<OscillatorState> trace;
  trace.reserve(search_limit + 1);
  int first_crossing = -1;
  for (int t = 0; t < search_limit; ++t) {
    const OscillatorState next = StepOscillator(state, params);
    const bool crossing = state.o1 < 0.0 && next.o1 >= 0.0;
    state = next;
    if (first_crossing >= 0) trace.push_back(state);
    if (!crossing) continue;
    if (first_crossing < 0) {
      first_crossing = t;
      trace.push_back(state);
      continue;
    }
    // `state` is the first sample of the next period.
    trace.pop_back();
    PeriodicOrbit orbit;
    orbit.period_ticks = static_cast<int>(trace.size());
    orbit.samples = std::move(trace);
    const OscillatorState wrapped =
        StepOscillator(orbit.samples.back(), params);
    orbit.closure_error =
        std::max(std::abs(wrapped.o0 - orbit.samples.front().o0),
                 std::abs(wrapped.o1 - orbit.samples.front().o1));
    return orbit;
  }
  throw PeriodNotFound("no full period of o1 zero crossings within " +
                       std::to_string(search_limit) + " ticks");
}

}  // namespace synloco
