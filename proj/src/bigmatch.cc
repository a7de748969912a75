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

#include "blackwell/bigmatch.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "blackwell/rng.h"
#include "blackwell/stats.h"

namespace blackwell::bigmatch {
namespace {

constexpr double kAlphaFlush = 1e-300;

double Sign(int j) { return j == 0 ? 1.0 : -1.0; }  // 1 - 2j

void CheckBit(int b, const char* what) {
  if (b != 0 && b != 1) {
    throw std::invalid_argument(
        fmt::format("{} must be 0 or 1, got {}", what, b));
  }
}

double NextAlpha(double alpha, double x) {
  const double next = alpha * (1.0 - x);
  return next < kAlphaFlush ? 0.0 : next;
}

}  // namespace

std::string_view ToString(GameState state) {
  switch (state) {
    case GameState::kOmega1:
      return "w1";
    case GameState::kStarPlus:
      return "1*";
    case GameState::kStarMinus:
      return "-1*";
  }
  return "?";
}

double Payoff(int i, int j, GameState omega) {
  CheckBit(i, "i");
  CheckBit(j, "j");
  switch (omega) {
    case GameState::kStarPlus:
      return 1.0;
    case GameState::kStarMinus:
      return -1.0;
    case GameState::kOmega1:
      return i == j ? 1.0 : -1.0;
  }
  return 0.0;
}

GameState Transition(int i, int j, GameState omega) {
  CheckBit(i, "i");
  CheckBit(j, "j");
  if (omega != GameState::kOmega1) return omega;
  if (i == 0) return GameState::kOmega1;
  return j == 1 ? GameState::kStarPlus : GameState::kStarMinus;
}

LambdaSchedule::LambdaSchedule(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("epsilon must lie in (0, 1], got {}", epsilon));
  }
}

double LambdaSchedule::operator()(Stage t) const {
  if (t < 1) throw std::invalid_argument("LambdaSchedule: stage must be >= 1");
  return epsilon_ * std::pow(static_cast<double>(t), -0.75);
}

WeightSchedule LambdaSchedule::Weights() const {
  return WeightSchedule::FirstUnitSecond(
      [schedule = *this](Stage t) { return schedule(t); });
}

Vec AuxOutcome(double alpha, double lambda, double x, int j) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument(
        fmt::format("AuxOutcome: lambda must be positive, got {}", lambda));
  }
  CheckBit(j, "j");
  const double scale = alpha * Sign(j);
  return {scale * x, scale * (x / lambda - 1.0)};
}

AuxFunction MakeAuxFunction(double alpha, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("MakeAuxFunction: lambda must be positive");
  }
  return AuxFunction{[alpha, lambda](const double& x, const int& j) {
                       return AuxOutcome(alpha, lambda, x, j);
                     },
                     {alpha, lambda}};
}

double BigMatchOracle(double lambda_t, double lambda,
                      std::span<const double> r) {
  if (r.size() != 2) {
    throw std::invalid_argument("BigMatchOracle: R must have dimension 2");
  }
  if (!(lambda > 0.0) || !(lambda_t > 0.0)) {
    throw std::invalid_argument("BigMatchOracle: lambdas must be positive");
  }
  const double r1 = std::max(0.0, r[0]);
  const double r2 = std::max(0.0, r[1]);
  if (r1 == 0.0 && r2 == 0.0) return 0.0;
  // The formula is homogeneous of degree 0 in R~, so rescale to keep the
  // products away from underflow. Written as lambda * n / (lambda r1 + n),
  // with n <= denominator, the result cannot round above lambda.
  const double scale = std::max(r1, r2);
  const double u1 = r1 / scale;
  const double u2 = r2 / scale;
  const double num = lambda_t * lambda_t * u2;
  const double den = lambda * u1 + num;
  if (den < 1e-300) return lambda;
  return lambda * (num / den);
}

AuxOracle MakeOracle(const LambdaSchedule& schedule) {
  return [schedule](Stage t, const AuxFunction& g, std::span<const double> r) {
    return BigMatchOracle(schedule(t), g.params.at(1), r);
  };
}

AuxOracle MakeBrokenOracle() {
  return [](Stage, const AuxFunction&, std::span<const double>) { return 0.0; };
}

Adversary Adversary::ConstZero() { return {Kind::kConstZero, 0.0, {}}; }
Adversary Adversary::ConstOne() { return {Kind::kConstOne, 1.0, {}}; }

Adversary Adversary::IidBernoulli(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("IID adversary needs q in [0, 1], got {}", q));
  }
  return {Kind::kIidBernoulli, q, {}};
}

Adversary Adversary::Periodic(std::vector<int> pattern) {
  if (pattern.empty()) {
    throw std::invalid_argument("periodic adversary needs a nonempty pattern");
  }
  for (int b : pattern) CheckBit(b, "periodic pattern entry");
  return {Kind::kPeriodic, 0.0, std::move(pattern)};
}

Adversary Adversary::Spiteful(double threshold) {
  if (!(threshold >= 0.0)) {
    throw std::invalid_argument("spiteful threshold must be nonnegative");
  }
  return {Kind::kSpiteful, threshold, {}};
}

Adversary Adversary::Parse(std::string_view spec, double epsilon) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos
                                   ? std::string_view{}
                                   : spec.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;
  if (head == "zero" && !has_arg) return ConstZero();
  if (head == "one" && !has_arg) return ConstOne();
  if (head == "spiteful" && !has_arg) return Spiteful(epsilon / 2);
  if (head == "iid" && has_arg) {
    double q = 0.0;
    const auto [ptr, ec] =
        std::from_chars(arg.data(), arg.data() + arg.size(), q);
    if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
      throw std::invalid_argument(fmt::format("bad iid probability '{}'", arg));
    }
    return IidBernoulli(q);
  }
  if (head == "periodic" && has_arg) {
    std::vector<int> pattern;
    for (char c : arg) {
      if (c != '0' && c != '1') {
        throw std::invalid_argument(
            fmt::format("bad periodic pattern '{}'", arg));
      }
      pattern.push_back(c - '0');
    }
    return Periodic(std::move(pattern));
  }
  throw std::invalid_argument(fmt::format(
      "unknown adversary '{}' (expected zero, one, iid:<q>, periodic:<bits>, "
      "spiteful)",
      spec));
}

std::string Adversary::Describe() const {
  switch (kind_) {
    case Kind::kConstZero:
      return "zero";
    case Kind::kConstOne:
      return "one";
    case Kind::kIidBernoulli:
      return fmt::format("iid:{}", param_);
    case Kind::kPeriodic: {
      std::string bits;
      for (int b : pattern_) bits.push_back(static_cast<char>('0' + b));
      return "periodic:" + bits;
    }
    case Kind::kSpiteful:
      return fmt::format("spiteful:{}", param_);
  }
  return "?";
}

double Adversary::Respond(std::span<const StageRecord> history) const {
  switch (kind_) {
    case Kind::kConstZero:
    case Kind::kConstOne:
    case Kind::kIidBernoulli:
      return param_;
    case Kind::kPeriodic:
      return pattern_[history.size() % pattern_.size()];
    case Kind::kSpiteful: {
      double mass = 0.0;
      for (const auto& rec : history) mass += rec.alpha * rec.x;
      return mass > param_ ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

Trajectory PlayTrajectory(const LambdaSchedule& schedule,
                          const Adversary& adversary, Stage horizon,
                          std::uint64_t seed, const Policy& policy,
                          RunnerLog* runner_log) {
  if (horizon < 1) throw std::invalid_argument("PlayTrajectory: horizon < 1");
  if (policy.kind == Policy::Kind::kConstant &&
      !(policy.constant_x >= 0.0 && policy.constant_x <= 1.0)) {
    throw std::invalid_argument("constant policy needs x in [0, 1]");
  }
  const WeightSchedule weights = schedule.Weights();
  BlackwellRunner<double, int> runner(weights,
                                      policy.kind == Policy::Kind::kBrokenOracle
                                          ? MakeBrokenOracle()
                                          : MakeOracle(schedule),
                                      runner_log != nullptr);
  Rng rng(seed);

  Trajectory traj;
  traj.stages.reserve(static_cast<std::size_t>(horizon));
  GameState omega = GameState::kOmega1;
  double alpha = 1.0;
  for (Stage t = 1; t <= horizon; ++t) {
    StageRecord rec;
    rec.t = t;
    rec.lambda = schedule(t);
    rec.alpha = alpha;
    rec.omega = omega;

    const Vec residual = NegOrthantResidual(runner.state().cumulative);
    const AuxFunction g = MakeAuxFunction(alpha, rec.lambda);
    rec.x = policy.kind == Policy::Kind::kConstant ? policy.constant_x
                                                   : runner.Choose(g);
    rec.y = adversary.Respond(traj.stages);
    rec.i = rng.Bernoulli(rec.x);
    rec.j = rng.Bernoulli(rec.y);

    const Vec& r = runner.Commit(g, rec.x, rec.j);
    rec.r = {r[0], r[1]};
    rec.norm_sq = WeightedNormSq(weights, t, r);
    rec.energy = runner.state().sq_ledger;
    rec.cum_r = {runner.state().cumulative[0], runner.state().cumulative[1]};
    rec.oracle_dot = WeightedDot(weights, t, r, residual);
    rec.residual_sq = residual[0] * residual[0] + residual[1] * residual[1];

    rec.payoff = Payoff(rec.i, rec.j, omega);
    omega = Transition(rec.i, rec.j, omega);
    alpha = NextAlpha(alpha, rec.x);
    traj.stages.push_back(rec);
  }
  traj.final_state = omega;
  if (runner_log != nullptr) *runner_log = runner.log();
  return traj;
}

double StrategyStep(std::span<const StageRecord> history,
                    const LambdaSchedule& schedule) {
  Vec cumulative(2, 0.0);
  for (std::size_t s = 0; s < history.size(); ++s) {
    const StageRecord& rec = history[s];
    const Vec r = AuxOutcome(rec.alpha, schedule(static_cast<Stage>(s + 1)),
                             rec.x, rec.j);
    cumulative[0] += r[0];
    cumulative[1] += r[1];
  }
  const Stage t = static_cast<Stage>(history.size()) + 1;
  const double lambda_t = schedule(t);
  const OrthantSplit split = ProjectNegOrthant(cumulative);
  return BigMatchOracle(lambda_t, lambda_t, split.residual);
}

std::vector<double> ReconstructMixedActions(std::span<const int> js,
                                            const LambdaSchedule& schedule) {
  std::vector<double> xs;
  xs.reserve(js.size() + 1);
  double sum1 = 0.0;
  double sum2 = 0.0;
  double survive = 1.0;  // prod_{u<s} (1 - x_u)
  for (std::size_t k = 0; k <= js.size(); ++k) {
    const double lam = schedule(static_cast<Stage>(k + 1));
    const double res1 = std::max(0.0, sum1);
    const double res2 = std::max(0.0, sum2);
    const double x = (res1 == 0.0 && res2 == 0.0)
                         ? 0.0
                         : lam * lam * res2 / (res1 + lam * res2);
    xs.push_back(x);
    if (k == js.size()) break;
    const double sign = 1.0 - 2.0 * js[k];
    sum1 += x * sign * survive;
    sum2 += (x / lam - 1.0) * sign * survive;
    survive = NextAlpha(survive, x);
  }
  return xs;
}

double PayoffDirect(const Trajectory& traj) {
  if (traj.stages.empty()) throw std::invalid_argument("empty trajectory");
  double sum = 0.0;
  for (const auto& rec : traj.stages) sum += rec.payoff;
  return sum / static_cast<double>(traj.stages.size());
}

ThreeTermSplit SplitThreeTerms(const Trajectory& traj) {
  if (traj.stages.empty()) throw std::invalid_argument("empty trajectory");
  double prefix = 0.0;  // sum_{s<t} alpha_s x_s (2j_s - 1)
  ThreeTermSplit split{0.0, 0.0, 0.0};
  for (const auto& rec : traj.stages) {
    const double sign = 2.0 * rec.j - 1.0;
    split.double_sum += prefix;
    split.stop_term += rec.alpha * (rec.x / rec.lambda - 1.0) * sign;
    split.residual += rec.alpha * rec.x * (2.0 - 1.0 / rec.lambda) * sign;
    prefix += rec.alpha * rec.x * sign;
  }
  const double horizon = static_cast<double>(traj.stages.size());
  split.double_sum /= horizon;
  split.stop_term /= horizon;
  split.residual /= horizon;
  return split;
}

double PayoffIdentitySample(const Trajectory& traj) {
  if (traj.stages.empty()) throw std::invalid_argument("empty trajectory");
  double prefix = 0.0;
  double double_sum = 0.0;
  double single_sum = 0.0;
  for (const auto& rec : traj.stages) {
    const double sign = 2.0 * rec.j - 1.0;
    double_sum += prefix;
    single_sum += rec.alpha * (2.0 * rec.x - 1.0) * sign;
    prefix += rec.alpha * rec.x * sign;
  }
  const double horizon = static_cast<double>(traj.stages.size());
  return double_sum / horizon + single_sum / horizon;
}

PayoffBoundTerms PayoffBoundTrackers(const Trajectory& traj,
                                     const LambdaSchedule& schedule) {
  if (traj.stages.empty()) throw std::invalid_argument("empty trajectory");
  double prefix = 0.0;
  double neg_double_sum = 0.0;
  double neg_stop_term = 0.0;
  double energy = 0.0;
  for (const auto& rec : traj.stages) {
    const double lam = schedule(rec.t);
    const double sign = 1.0 - 2.0 * rec.j;
    neg_double_sum += prefix;
    neg_stop_term += rec.alpha * (rec.x / lam - 1.0) * sign;
    prefix += rec.alpha * rec.x * sign;
    energy += rec.r[0] * rec.r[0] + lam * lam * rec.r[1] * rec.r[1];
  }
  const Stage big_t = traj.horizon();
  const double horizon = static_cast<double>(big_t);
  return {neg_double_sum / horizon, neg_stop_term / horizon,
          3.0 * std::pow(horizon, -0.25), energy,
          (2.0 + 1.0 / schedule(big_t)) / horizon};
}

double SumAlphaX(const Trajectory& traj) {
  double sum = 0.0;
  for (const auto& rec : traj.stages) sum += rec.alpha * rec.x;
  return sum;
}

TrajectoryChecks CheckTrajectory(const Trajectory& traj,
                                 const LambdaSchedule& schedule) {
  if (traj.stages.empty()) throw std::invalid_argument("empty trajectory");
  TrajectoryChecks out{};
  out.max_x_minus_lambda = -std::numeric_limits<double>::infinity();
  out.max_scaled_oracle_dot = 0.0;
  out.distance_max_excess = -std::numeric_limits<double>::infinity();
  out.coordinate_max_excess = {-std::numeric_limits<double>::infinity(),
                               -std::numeric_limits<double>::infinity()};
  out.max_stage_energy_excess = -std::numeric_limits<double>::infinity();
  out.max_energy_excess = -std::numeric_limits<double>::infinity();

  const double eps = schedule.epsilon();
  double cum1 = 0.0;
  double cum2 = 0.0;
  double energy = 0.0;
  double alpha = 1.0;
  std::vector<int> js;
  js.reserve(traj.stages.size());
  for (const auto& rec : traj.stages) {
    const double lam = schedule(rec.t);
    const double td = static_cast<double>(rec.t);
    out.max_x_minus_lambda = std::max(out.max_x_minus_lambda, rec.x - lam);

    const double res1 = std::max(0.0, cum1);
    const double res2 = std::max(0.0, cum2);
    const Vec r = AuxOutcome(rec.alpha, lam, rec.x, rec.j);
    const double dot = r[0] * res1 + lam * lam * r[1] * res2;
    out.max_scaled_oracle_dot =
        std::max(out.max_scaled_oracle_dot,
                 std::abs(dot) / (1.0 + res1 * res1 + res2 * res2));

    const double norm_sq = r[0] * r[0] + lam * lam * r[1] * r[1];
    out.max_stage_energy_excess =
        std::max(out.max_stage_energy_excess, norm_sq - 3.0 * lam * lam);
    cum1 += r[0];
    cum2 += r[1];
    energy += norm_sq;
    out.max_energy_excess =
        std::max(out.max_energy_excess, energy - 9 * eps * eps);

    const double dist = std::sqrt(std::pow(std::max(0.0, cum1), 2) +
                                  lam * lam * std::pow(std::max(0.0, cum2), 2));
    const double root = std::sqrt(energy);
    out.distance_max_excess =
        std::max(out.distance_max_excess, dist / td - root / td);
    out.coordinate_max_excess[0] =
        std::max(out.coordinate_max_excess[0], cum1 / td - root / td);
    out.coordinate_max_excess[1] =
        std::max(out.coordinate_max_excess[1], cum2 / td - root / (td * lam));

    const double ledger_err =
        std::max({std::abs(cum1 - rec.cum_r[0]) / (1.0 + std::abs(cum1)),
                  std::abs(cum2 - rec.cum_r[1]) / (1.0 + std::abs(cum2)),
                  std::abs(energy - rec.energy) / std::max(energy, 1e-300),
                  std::abs(alpha - rec.alpha) / std::max(alpha, 1e-300)});
    out.ledger_rel_error = std::max(out.ledger_rel_error, ledger_err);
    alpha = NextAlpha(alpha, rec.x);
    js.push_back(rec.j);
  }

  js.pop_back();
  const std::vector<double> xs = ReconstructMixedActions(js, schedule);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.reconstruction_error =
        std::max(out.reconstruction_error, std::abs(xs[k] - traj.stages[k].x));
  }
  out.three_term_residual =
      std::abs(PayoffIdentitySample(traj) - SplitThreeTerms(traj).total());
  out.payoff_terms = PayoffBoundTrackers(traj, schedule);
  return out;
}

StatCheck AbsorptionCheck(std::span<const AbsorptionSample> samples) {
  if (samples.size() < tolerance::kMinStatisticalTrials) {
    throw std::invalid_argument(fmt::format(
        "AbsorptionCheck: {} trials is underpowered (need at least {})",
        samples.size(), tolerance::kMinStatisticalTrials));
  }
  double mass = 0.0;
  double absorbed = 0.0;
  for (const auto& s : samples) {
    mass += s.sum_alpha_x;
    absorbed += s.absorbed ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(samples.size());
  const double p = std::clamp(mass / n, 0.0, 1.0);
  StatCheck check;
  check.observed = std::abs(mass / n - absorbed / n);
  check.std_error = std::sqrt(p * (1.0 - p) / n);
  check.allowed = tolerance::kStatisticalSigmas * check.std_error;
  return check;
}

StatCheck AbsorptionCheck(std::span<const Trajectory> trials) {
  std::vector<AbsorptionSample> samples;
  samples.reserve(trials.size());
  for (const auto& traj : trials) {
    samples.push_back({SumAlphaX(traj), traj.absorbed()});
  }
  return AbsorptionCheck(samples);
}

StatCheck PayoffIdentityCheck(std::span<const double> direct,
                              std::span<const double> identity) {
  if (direct.size() != identity.size()) {
    throw std::invalid_argument("PayoffIdentityCheck: sample sizes differ");
  }
  StatCheck check;
  if (direct.size() < tolerance::kMinStatisticalTrials) {
    check.skipped = true;
    return check;
  }
  const MeanEstimate a = Estimate(direct);
  const MeanEstimate b = Estimate(identity);
  check.observed = std::abs(a.mean - b.mean);
  check.std_error = std::hypot(a.std_error, b.std_error);
  check.allowed = tolerance::kStatisticalSigmas * check.std_error;
  return check;
}

StatCheck ResidualTermCheck(std::span<const double> residual_terms,
                            double residual_cap) {
  StatCheck check;
  if (residual_terms.size() < tolerance::kMinStatisticalTrials) {
    check.skipped = true;
    return check;
  }
  const MeanEstimate est = Estimate(residual_terms);
  check.observed = std::abs(est.mean);
  check.std_error = est.std_error;
  check.allowed = residual_cap + tolerance::kStatisticalSigmas * est.std_error;
  return check;
}

}  // namespace blackwell::bigmatch
