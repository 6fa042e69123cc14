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

#include "synloco/gait_analysis.h"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "synloco/errors.h"

namespace synloco {

int CircularCrossCorrelationPeakLag(std::span<const double> a,
                                    std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw DimensionMismatch("cross-correlation needs equal, non-empty traces");
  }
  const size_t n = a.size();
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  int best_lag = 0;
  double best = -1e300;
  for (size_t lag = 0; lag < n; ++lag) {
    double sum = 0.0;
    for (size_t k = 0; k < n; ++k) {
      sum += (a[k] - mean_a) * (b[(k + lag) % n] - mean_b);
    }
    if (sum > best) {
      best = sum;
      best_lag = static_cast<int>(lag);
    }
  }
  return best_lag;
}

int CircularLagDistance(int lag, int target, int n) {
  const int d = ((lag - target) % n + n) % n;
  return std::min(d, n - d);
}

double Clearance(std::span<const double> heights) {
  if (heights.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(heights.begin(), heights.end());
  return *hi - *lo;
}

double StanceFraction(const std::vector<bool>& contacts) {
  if (contacts.empty()) return 0.0;
  const auto n = std::count(contacts.begin(), contacts.end(), true);
  return static_cast<double>(n) / contacts.size();
}

}  // namespace synloco
