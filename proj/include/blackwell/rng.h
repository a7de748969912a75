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

#ifndef BLACKWELL_RNG_H_
#define BLACKWELL_RNG_H_

#include <cstdint>
#include <random>

namespace blackwell {

inline constexpr char kRngDescription[] =
    "mt19937_64 per trial, seeded with splitmix64(master_seed ^ "
    "splitmix64(trial_index)); uniforms are (draw >> 11) * 2^-53";

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveTrialSeed(std::uint64_t master_seed,
                                     std::uint64_t trial_index) {
  return SplitMix64(master_seed ^ SplitMix64(trial_index));
}

// The standard distributions are implementation-defined, so uniforms and
// Bernoulli draws are built directly on the engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // 1 with probability p; p <= 0 never fires, p >= 1 always does.
  int Bernoulli(double p) { return Uniform() < p ? 1 : 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace blackwell

#endif  // BLACKWELL_RNG_H_
