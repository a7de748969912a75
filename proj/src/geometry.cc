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

#include "blackwell/geometry.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace blackwell {
namespace {

void CheckStage(Stage t) {
  if (t < 1) {
    throw std::invalid_argument("stage index must be >= 1, got " +
                                std::to_string(t));
  }
}

void CheckDims(const WeightSchedule& w, std::size_t a, std::size_t b) {
  if (a != static_cast<std::size_t>(w.dims()) || b != a) {
    throw std::invalid_argument(
        "dimension mismatch: schedule has " + std::to_string(w.dims()) +
        ", vectors have " + std::to_string(a) + " and " + std::to_string(b));
  }
}

}  // namespace

WeightSchedule::WeightSchedule(int dims, WeightFn weight)
    : dims_(dims), weight_(std::move(weight)) {
  if (dims_ < 1) throw std::invalid_argument("WeightSchedule: dims < 1");
  if (!weight_) throw std::invalid_argument("WeightSchedule: empty weight fn");
}

WeightSchedule WeightSchedule::Uniform(int dims) {
  return WeightSchedule(dims, [](Stage, int) { return 1.0; });
}

WeightSchedule WeightSchedule::FirstUnitSecond(
    std::function<double(Stage)> lambda) {
  return WeightSchedule(2, [lambda = std::move(lambda)](Stage t, int coord) {
    return coord == 0 ? 1.0 : lambda(t);
  });
}

double WeightSchedule::Weight(Stage t, int coord) const {
  CheckStage(t);
  if (coord < 0 || coord >= dims_) {
    throw std::out_of_range("WeightSchedule: coordinate out of range");
  }
  return weight_(t, coord);
}

bool WeightSchedule::IsPositiveNonincreasing(Stage horizon) const {
  for (int i = 0; i < dims_; ++i) {
    double prev = Weight(1, i);
    if (!(prev > 0.0)) return false;
    for (Stage t = 2; t <= horizon; ++t) {
      const double cur = Weight(t, i);
      if (!(cur > 0.0) || cur > prev) return false;
      prev = cur;
    }
  }
  return true;
}

double WeightedDot(const WeightSchedule& w, Stage t, std::span<const double> u,
                   std::span<const double> v) {
  CheckStage(t);
  CheckDims(w, u.size(), v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double mu = w.Weight(t, static_cast<int>(i));
    sum += mu * mu * (u[i] * v[i]);
  }
  return sum;
}

double WeightedNormSq(const WeightSchedule& w, Stage t,
                      std::span<const double> u) {
  return WeightedDot(w, t, u, u);
}

double WeightedNorm(const WeightSchedule& w, Stage t,
                    std::span<const double> u) {
  return std::sqrt(WeightedNormSq(w, t, u));
}

OrthantSplit ProjectNegOrthant(std::span<const double> r) {
  OrthantSplit split{Vec(r.size()), Vec(r.size())};
  for (std::size_t i = 0; i < r.size(); ++i) {
    split.projection[i] = std::min(0.0, r[i]);
    split.residual[i] = std::max(0.0, r[i]);
  }
  return split;
}

Vec NegOrthantResidual(std::span<const double> r) {
  Vec out(r.size());
  std::transform(r.begin(), r.end(), out.begin(),
                 [](double x) { return std::max(0.0, x); });
  return out;
}

}  // namespace blackwell
