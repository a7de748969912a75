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

#ifndef BLACKWELL_GEOMETRY_H_
#define BLACKWELL_GEOMETRY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace blackwell {

using Stage = std::int64_t;
using Vec = std::vector<double>;

// Per-coordinate weights mu_t^(i) > 0, nonincreasing in t, defining
//   <u, v>_(t) = sum_i (mu_t^(i))^2 u^(i) v^(i).
// The weights are a pure function of (t, i); coordinates are 0-based here.
class WeightSchedule {
 public:
  using WeightFn = std::function<double(Stage t, int coord)>;

  WeightSchedule(int dims, WeightFn weight);

  // mu == 1 everywhere: the plain Euclidean inner product.
  static WeightSchedule Uniform(int dims);
  // mu^(1) == 1, mu^(2) == lambda(t).
  static WeightSchedule FirstUnitSecond(std::function<double(Stage)> lambda);

  int dims() const { return dims_; }
  double Weight(Stage t, int coord) const;

  // Samples t = 1..horizon and reports whether every coordinate is positive
  // and nonincreasing over that prefix.
  bool IsPositiveNonincreasing(Stage horizon) const;

 private:
  int dims_;
  WeightFn weight_;
};

double WeightedDot(const WeightSchedule& w, Stage t, std::span<const double> u,
                   std::span<const double> v);
double WeightedNormSq(const WeightSchedule& w, Stage t,
                      std::span<const double> u);
double WeightedNorm(const WeightSchedule& w, Stage t,
                    std::span<const double> u);

struct OrthantSplit {
  Vec projection;  // min(0, R)
  Vec residual;    // max(0, R)
};

// Projection onto the negative orthant. The componentwise clamp is the
// minimizer for every diagonal weight schedule, so no weights are needed.
OrthantSplit ProjectNegOrthant(std::span<const double> r);
Vec NegOrthantResidual(std::span<const double> r);

}  // namespace blackwell

#endif  // BLACKWELL_GEOMETRY_H_
