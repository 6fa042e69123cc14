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

#ifndef SYNLOCO_GAIT_ANALYSIS_H_
#define SYNLOCO_GAIT_ANALYSIS_H_

#include <span>
#include <vector>

namespace synloco {

// Lag in [0, n) maximizing sum_k (a_k - mean a) * (b_{(k + lag) mod n} -
// mean b). Both sequences must have the same non-zero length. Ties resolve
// to the smallest lag.
int CircularCrossCorrelationPeakLag(std::span<const double> a,
                                    std::span<const double> b);

// Smallest circular distance between `lag` and `target` modulo n.
int CircularLagDistance(int lag, int target, int n);

// Peak-to-trough range of a height trace.
double Clearance(std::span<const double> heights);

// Fraction of true entries.
double StanceFraction(const std::vector<bool>& contacts);

}  // namespace synloco

#endif  // SYNLOCO_GAIT_ANALYSIS_H_
