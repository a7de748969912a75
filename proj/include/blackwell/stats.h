// Copyright 2026 The Blackwell Approachability Authors.
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

#ifndef BLACKWELL_STATS_H_
#define BLACKWELL_STATS_H_

#include <cmath>
#include <cstddef>
#include <span>

namespace blackwell {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n)
  std::size_t n = 0;
};

// Two passes, fixed summation order, so results are bit-stable.
inline MeanEstimate Estimate(std::span<const double> xs) {
  MeanEstimate est;
  est.n = xs.size();
  if (xs.empty()) return est;
  double sum = 0.0;
  for (double x : xs) sum += x;
  est.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return est;
  double ss = 0.0;
  for (double x : xs) ss += (x - est.mean) * (x - est.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  est.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  return est;
}

}  // namespace blackwell

#endif  // BLACKWELL_STATS_H_
