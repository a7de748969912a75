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

#include "blackwell/approachability.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blackwell {

BoundGap DistanceGap(const RunnerState& state, const WeightSchedule& w) {
  if (state.t < 1) {
    throw std::domain_error("DistanceGap: no stage has been played");
  }
  const double horizon = static_cast<double>(state.t);
  const Vec residual = NegOrthantResidual(state.cumulative);
  return {WeightedNorm(w, state.t, residual) / horizon,
          std::sqrt(state.sq_ledger) / horizon};
}

BoundGap CoordinateGapFromSum(const RunnerState& state, const WeightSchedule& w,
                              int coord, double outcome_sum) {
  if (state.t < 1) {
    throw std::domain_error("CoordinateGap: no stage has been played");
  }
  const double horizon = static_cast<double>(state.t);
  return {outcome_sum / horizon,
          std::sqrt(state.sq_ledger) / (horizon * w.Weight(state.t, coord))};
}

AnytimeBoundMonitor::AnytimeBoundMonitor(int dims, double rel_tol,
                                         double abs_tol)
    : rel_tol_(rel_tol),
      abs_tol_(abs_tol),
      max_excess_(dims + 1, -std::numeric_limits<double>::infinity()),
      violations_(dims + 1, 0) {}

void AnytimeBoundMonitor::Track(const BoundGap& gap, std::size_t slot) {
  max_excess_[slot] = std::max(max_excess_[slot], gap.excess());
  if (gap.lhs > gap.rhs * (1 + rel_tol_) + abs_tol_) ++violations_[slot];
}

void AnytimeBoundMonitor::Observe(const RunnerState& state,
                                  const WeightSchedule& w) {
  if (state.cumulative.size() + 1 != max_excess_.size()) {
    throw std::invalid_argument("AnytimeBoundMonitor: dimension mismatch");
  }
  Track(DistanceGap(state, w), 0);
  for (std::size_t i = 0; i < state.cumulative.size(); ++i) {
    Track(CoordinateGapFromSum(state, w, static_cast<int>(i),
                               state.cumulative[i]),
          i + 1);
  }
  ++stages_;
}

bool AnytimeBoundMonitor::AllHold() const {
  return std::all_of(violations_.begin(), violations_.end(),
                     [](std::size_t v) { return v == 0; });
}

std::vector<double> UniformGrid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("UniformGrid: need step > 0 and hi >= lo");
  }
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
  std::vector<double> grid(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    grid[k] = n == 0 ? lo : lo + (hi - lo) * static_cast<double>(k) / n;
  }
  grid.back() = hi;
  return grid;
}

}  // namespace blackwell
