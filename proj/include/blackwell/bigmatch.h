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

#ifndef BLACKWELL_BIGMATCH_H_
#define BLACKWELL_BIGMATCH_H_

// The Big Match and the approachability-based strategy for Player I.
//
// Player I's stopping probability x_t is produced by Blackwell's algorithm on
// an auxiliary two-dimensional problem whose outcome at stage t is
//
//   g_{alpha_t, lambda_t}(x, j) = alpha_t (1 - 2j) (x, x / lambda_t - 1),
//
// with alpha_t = prod_{s<t} (1 - x_s), lambda_t = epsilon t^(-3/4), and the
// inner product <u, v>_(t) = u1 v1 + lambda_t^2 u2 v2. The auxiliary run uses
// the mixed actions x_t; the physical game uses the sampled actions i_t.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blackwell/approachability.h"
#include "blackwell/geometry.h"

namespace blackwell::bigmatch {

enum class GameState { kOmega1, kStarPlus, kStarMinus };

std::string_view ToString(GameState state);

double Payoff(int i, int j, GameState omega);
GameState Transition(int i, int j, GameState omega);

class LambdaSchedule {
 public:
  // epsilon in (0, 1].
  explicit LambdaSchedule(double epsilon);

  double epsilon() const { return epsilon_; }
  // epsilon * t^(-3/4)
  double operator()(Stage t) const;
  // mu^(1) = 1, mu^(2) = lambda_t.
  WeightSchedule Weights() const;

 private:
  double epsilon_;
};

using AuxFunction = OutcomeFunction<double, int>;
using AuxOracle = Oracle<double, int>;

// alpha (1 - 2j) (x, x / lambda - 1). Throws if lambda <= 0.
Vec AuxOutcome(double alpha, double lambda, double x, int j);
// The family member g_{alpha, lambda}; params = {alpha, lambda}.
AuxFunction MakeAuxFunction(double alpha, double lambda);

// Closed-form oracle on the residual R~ = max(0, R):
//   0 if R~ = 0, else lambda_t^2 R~2 / (R~1 + lambda_t^2 R~2 / lambda).
// The result satisfies 0 <= x <= lambda in floating point, and
// <g_{alpha, lambda}(x, j), R~>_(t) = 0 for both j.
double BigMatchOracle(double lambda_t, double lambda,
                      std::span<const double> r);

// Oracle over the auxiliary family, reading lambda from g.params.
AuxOracle MakeOracle(const LambdaSchedule& schedule);
// Always plays 0. Violates Blackwell's condition; used to check the checkers.
AuxOracle MakeBrokenOracle();

struct StageRecord {
  Stage t = 0;
  double x = 0.0;  // Player I mixed action
  double y = 0.0;  // Player II mixed action
  int i = 0;       // realized actions
  int j = 0;
  GameState omega = GameState::kOmega1;  // state at the start of stage t
  double alpha = 1.0;                    // prod_{s<t} (1 - x_s)
  double lambda = 1.0;                   // lambda_t
  std::array<double, 2> r{};             // auxiliary outcome g_t(x_t, j_t)
  double payoff = 0.0;                   // p(i_t, j_t, omega_t)
  double norm_sq = 0.0;                  // ||r_t||_(t)^2
  double energy = 0.0;            // sum_{s<=t} ||r_s||_(s)^2 (runner ledger)
  std::array<double, 2> cum_r{};  // R_t (runner state)
  double oracle_dot = 0.0;        // <r_t, R~_{t-1}>_(t)
  double residual_sq = 0.0;       // |R~_{t-1}|^2 (Euclidean)
};

struct Trajectory {
  std::vector<StageRecord> stages;
  GameState final_state = GameState::kOmega1;  // omega_{T+1}
  bool absorbed() const { return final_state != GameState::kOmega1; }
  Stage horizon() const { return static_cast<Stage>(stages.size()); }
};

class Adversary {
 public:
  enum class Kind {
    kConstZero,
    kConstOne,
    kIidBernoulli,
    kPeriodic,
    kSpiteful
  };

  static Adversary ConstZero();
  static Adversary ConstOne();
  static Adversary IidBernoulli(double q);
  // y_t = pattern[(t - 1) mod n], entries in {0, 1}.
  static Adversary Periodic(std::vector<int> pattern);
  // j = 0 until sum_s alpha_s x_s > threshold, then j = 1 forever.
  static Adversary Spiteful(double threshold);

  // "zero", "one", "iid:<q>", "periodic:<bits>", "spiteful". The spiteful
  // threshold is epsilon / 2.
  static Adversary Parse(std::string_view spec, double epsilon);

  Kind kind() const { return kind_; }
  std::string Describe() const;

  // Mixed action y_t from the stages played so far.
  double Respond(std::span<const StageRecord> history) const;

 private:
  Adversary(Kind kind, double param, std::vector<int> pattern)
      : kind_(kind), param_(param), pattern_(std::move(pattern)) {}

  Kind kind_;
  double param_;
  std::vector<int> pattern_;
};

// How Player I picks x_t. Only kApproachability is the strategy under study;
// the others exist to exercise the checks.
struct Policy {
  enum class Kind { kApproachability, kBrokenOracle, kConstant };
  Kind kind = Kind::kApproachability;
  double constant_x = 0.0;

  static Policy Approachability() { return {}; }
  static Policy BrokenOracle() { return {Kind::kBrokenOracle, 0.0}; }
  static Policy Constant(double x) { return {Kind::kConstant, x}; }
};

using RunnerLog = std::vector<StepLog<double, int>>;

// Simulates `horizon` stages. The auxiliary recursion runs for all stages,
// including after physical absorption. When `runner_log` is given, the
// approachability runner logs every step into it.
Trajectory PlayTrajectory(const LambdaSchedule& schedule,
                          const Adversary& adversary, Stage horizon,
                          std::uint64_t seed,
                          const Policy& policy = Policy::Approachability(),
                          RunnerLog* runner_log = nullptr);

// x_t recomputed from the stages before t through the auxiliary outcomes and
// the oracle, with lambda = lambda_t.
double StrategyStep(std::span<const StageRecord> history,
                    const LambdaSchedule& schedule);

// The strategy written out directly as a function of j_1..j_{T-1}: running
// sums of x_s (1 - 2j_s) alpha_s and (x_s / lambda_s - 1)(1 - 2j_s) alpha_s
// and x_t = lambda_t^2 R~2 / (R~1 + lambda_t R~2). Returns x_1..x_T where
// T = js.size() + 1.
std::vector<double> ReconstructMixedActions(std::span<const int> js,
                                            const LambdaSchedule& schedule);

// One Monte Carlo sample of the T-stage payoff: mean of payoff_t.
double PayoffDirect(const Trajectory& traj);

// (1/T) sum_t sum_{s<t} alpha_s x_s (2j_s - 1) + (1/T) sum_t alpha_t
// (2x_t - 1)(2j_t - 1): the random variable whose mean is the T-stage payoff.
double PayoffIdentitySample(const Trajectory& traj);

struct ThreeTermSplit {
  double double_sum;  // (1/T) sum_t sum_{s<t} alpha_s x_s (2j_s - 1)
  double stop_term;   // (1/T) sum_t alpha_t (x_t / lambda_t - 1)(2j_t - 1)
  double residual;    // (1/T) sum_t alpha_t x_t (2 - 1 / lambda_t)(2j_t - 1)
  double total() const { return double_sum + stop_term + residual; }
};
ThreeTermSplit SplitThreeTerms(const Trajectory& traj);

struct PayoffBoundTerms {
  double
      neg_double_sum;  // (1/T) sum_t sum_{s<t} alpha_s x_s (1 - 2j_s) <= 3 eps
  double neg_stop_term;  // (1/T) sum_t alpha_t (x_t/lambda_t - 1)(1 - 2j_t)
  double stop_term_cap;  // 3 T^(-1/4)
  double energy;         // sum_t ||r_t||_(t)^2 <= 9 eps^2
  double residual_cap;   // (2 + 1/lambda_T) / T
};
PayoffBoundTerms PayoffBoundTrackers(const Trajectory& traj,
                                     const LambdaSchedule& schedule);

double SumAlphaX(const Trajectory& traj);

namespace tolerance {
inline constexpr double kOracleDot = 1e-12;  // scaled by 1 + |R~|^2
inline constexpr double kAnytimeBound = 1e-9;
inline constexpr double kEnergy = 1e-9;
inline constexpr double kStageEnergy = 1e-12;
inline constexpr double kPayoffTerms = 1e-9;
inline constexpr double kIdentity = 1e-12;
inline constexpr double kReconstruction = 1e-9;
inline constexpr double kStatisticalSigmas = 4.0;
inline constexpr std::size_t kMinStatisticalTrials = 100;
}  // namespace tolerance

// Deterministic consequences of the construction, evaluated on one
// trajectory from its log. Bounds are recomputed from (x, j, alpha) and r
// rather than read from the runner.
struct TrajectoryChecks {
  double max_x_minus_lambda;     // <= 0 exactly
  double max_scaled_oracle_dot;  // |<r_t, R~_{t-1}>| / (1 + |R~_{t-1}|^2)
  double distance_max_excess;    // max_t lhs - rhs
  std::array<double, 2> coordinate_max_excess;
  double max_stage_energy_excess;  // max_t ||r_t||^2 - 3 lambda_t^2
  double max_energy_excess;        // max_t energy_t - 9 eps^2
  double ledger_rel_error;         // logged vs recomputed R and energy
  double three_term_residual;      // |identity - (term1 + term2 + term3)|
  double reconstruction_error;     // max_t |x_t - reconstructed x_t|
  PayoffBoundTerms payoff_terms;
};
TrajectoryChecks CheckTrajectory(const Trajectory& traj,
                                 const LambdaSchedule& schedule);

struct StatCheck {
  bool skipped = false;
  double observed = 0.0;  // |difference| or |mean|
  double allowed = 0.0;   // bound the observed value is compared against
  double std_error = 0.0;
  bool pass() const { return !skipped && observed <= allowed; }
};

struct AbsorptionSample {
  double sum_alpha_x;
  bool absorbed;
};

// mean(sum_t alpha_t x_t) against the absorption frequency by T, within 4
// binomial standard errors sqrt(p (1 - p) / n), p = mean(sum_t alpha_t x_t).
// Throws with fewer than 100 samples.
StatCheck AbsorptionCheck(std::span<const AbsorptionSample> samples);
StatCheck AbsorptionCheck(std::span<const Trajectory> trials);

// |mean(direct) - mean(identity)| <= 4 sqrt(se_direct^2 + se_identity^2).
StatCheck PayoffIdentityCheck(std::span<const double> direct,
                              std::span<const double> identity);

// |mean(residual term)| <= (2 + 1/lambda_T) / T + 4 se.
StatCheck ResidualTermCheck(std::span<const double> residual_terms,
                            double residual_cap);

}  // namespace blackwell::bigmatch

#endif  // BLACKWELL_BIGMATCH_H_
