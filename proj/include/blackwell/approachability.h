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

#ifndef BLACKWELL_APPROACHABILITY_H_
#define BLACKWELL_APPROACHABILITY_H_

// Blackwell approachability with a time-dependent outcome function g_t and a
// time-dependent diagonal inner product, targeting the negative orthant.
//
// At stage t the decision maker plays a_t = oracle(t, g_t, R_{t-1}), nature
// plays b_t, and the outcome r_t = g_t(a_t, b_t) is accumulated into
// R_t = r_1 + ... + r_t. When the oracle satisfies Blackwell's condition and
// the norms are nonincreasing in t, the distance of R_T / T to the orthant is
// bounded by sqrt(sum_t ||r_t||_(t)^2) / T at every T.
//
// Action types are template parameters; this module never inspects them.

#include <fmt/format.h>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blackwell/geometry.h"

namespace blackwell {

template <typename Action, typename NatureAction>
struct OutcomeFunction {
  std::function<Vec(const Action&, const NatureAction&)> eval;
  // Identifies the member of the family, e.g. (alpha, lambda).
  Vec params;

  Vec operator()(const Action& a, const NatureAction& b) const {
    return eval(a, b);
  }
};

template <typename Action, typename NatureAction>
using Oracle =
    std::function<Action(Stage, const OutcomeFunction<Action, NatureAction>&,
                         std::span<const double>)>;

struct RunnerState {
  Stage t = 0;
  Vec cumulative;          // R_t
  double sq_ledger = 0.0;  // sum_{s<=t} ||r_s||_(s)^2
};

template <typename Action, typename NatureAction>
struct StepLog {
  Stage t;
  Action action;
  NatureAction nature;
  Vec outcome;
  double norm_sq;
};

template <typename Action>
struct StepResult {
  Action action;
  Vec outcome;
};

template <typename Action, typename NatureAction>
class BlackwellRunner {
 public:
  using Outcome = OutcomeFunction<Action, NatureAction>;
  using OracleFn = Oracle<Action, NatureAction>;
  using Log = StepLog<Action, NatureAction>;

  BlackwellRunner(WeightSchedule weights, OracleFn oracle, bool logging = false)
      : weights_(std::move(weights)),
        oracle_(std::move(oracle)),
        logging_(logging) {
    state_.cumulative.assign(weights_.dims(), 0.0);
  }

  const RunnerState& state() const { return state_; }
  const WeightSchedule& weights() const { return weights_; }
  bool logging() const { return logging_; }
  const std::vector<Log>& log() const { return log_; }

  // The oracle's action for the upcoming stage. At t = 1 this is
  // oracle(1, g_1, 0), which serves as the initial action a_1.
  Action Choose(const Outcome& g) const {
    return oracle_(state_.t + 1, g, state_.cumulative);
  }

  // Records the upcoming stage with action `a`. Step() passes the oracle's
  // choice; callers may pass another action to drive the bookkeeping with a
  // different policy.
  const Vec& Commit(const Outcome& g, const Action& a, const NatureAction& b) {
    if (state_.t == std::numeric_limits<Stage>::max()) {
      throw std::overflow_error("BlackwellRunner: stage counter overflow");
    }
    const Stage t = state_.t + 1;
    last_outcome_ = g(a, b);
    if (last_outcome_.size() != state_.cumulative.size()) {
      throw std::invalid_argument("BlackwellRunner: outcome has dimension " +
                                  std::to_string(last_outcome_.size()) +
                                  ", expected " +
                                  std::to_string(state_.cumulative.size()));
    }
    const double norm_sq = WeightedNormSq(weights_, t, last_outcome_);
    for (std::size_t i = 0; i < last_outcome_.size(); ++i) {
      state_.cumulative[i] += last_outcome_[i];
    }
    state_.sq_ledger += norm_sq;
    state_.t = t;
    if (logging_) log_.push_back(Log{t, a, b, last_outcome_, norm_sq});
    return last_outcome_;
  }

  StepResult<Action> Step(const Outcome& g, const NatureAction& b) {
    Action a = Choose(g);
    const Vec& r = Commit(g, a, b);
    return {std::move(a), r};
  }

 private:
  WeightSchedule weights_;
  OracleFn oracle_;
  bool logging_;
  RunnerState state_;
  Vec last_outcome_;
  std::vector<Log> log_;
};

struct BoundGap {
  double lhs;
  double rhs;
  double excess() const { return lhs - rhs; }
  bool Holds(double rel_tol = 1e-9) const { return lhs <= rhs * (1 + rel_tol); }
};

// min_{r in orthant} ||R_T / T - r||_(T)  versus  sqrt(ledger) / T.
BoundGap DistanceGap(const RunnerState& state, const WeightSchedule& w);

// Per-coordinate form: (1/T) sum_t r_t^(i)  versus
// sqrt(ledger) / (T mu_T^(i)). `outcome_sum` is sum_t r_t^(i).
BoundGap CoordinateGapFromSum(const RunnerState& state, const WeightSchedule& w,
                              int coord, double outcome_sum);

// Recomputes the coordinate sum from the step log, independent of the
// runner's cumulative vector. Requires logging.
template <typename Action, typename NatureAction>
BoundGap CoordinateGap(const BlackwellRunner<Action, NatureAction>& runner,
                       int coord) {
  if (!runner.logging()) {
    throw std::logic_error("CoordinateGap: runner was built without logging");
  }
  if (coord < 0 || coord >= runner.weights().dims()) {
    throw std::out_of_range("CoordinateGap: coordinate out of range");
  }
  double sum = 0.0;
  for (const auto& rec : runner.log()) sum += rec.outcome[coord];
  return CoordinateGapFromSum(runner.state(), runner.weights(), coord, sum);
}

// Tracks both bounds after every stage in O(d) per update. A stage violates
// a bound when lhs > rhs * (1 + rel_tol) + abs_tol.
class AnytimeBoundMonitor {
 public:
  AnytimeBoundMonitor(int dims, double rel_tol = 1e-9, double abs_tol = 0.0);

  void Observe(const RunnerState& state, const WeightSchedule& w);

  Stage stages() const { return stages_; }
  // max over observed stages of lhs - rhs; <= 0 means the bound held exactly.
  double distance_max_excess() const { return max_excess_[0]; }
  double coordinate_max_excess(int coord) const {
    return max_excess_.at(coord + 1);
  }
  std::size_t distance_violations() const { return violations_[0]; }
  std::size_t coordinate_violations(int coord) const {
    return violations_.at(coord + 1);
  }
  bool AllHold() const;

 private:
  void Track(const BoundGap& gap, std::size_t slot);

  double rel_tol_;
  double abs_tol_;
  Stage stages_ = 0;
  // Slot 0 is the full-vector bound, slot i + 1 is coordinate i.
  std::vector<double> max_excess_;
  std::vector<std::size_t> violations_;
};

struct BlackwellConditionReport {
  double max_delta = -std::numeric_limits<double>::infinity();
  std::size_t worst_r = 0;
  std::size_t worst_b = 0;
  std::size_t evaluated = 0;
  double tolerance = 1e-10;
  bool pass() const { return evaluated > 0 && max_delta <= tolerance; }
};

// Spot check of Blackwell's condition: for each sampled R and nature action b,
// delta = <g(oracle(t, g, R), b), residual(R)>_(t) must be <= tolerance.
template <typename Action, typename NatureAction>
BlackwellConditionReport CheckBlackwellCondition(
    const Oracle<Action, NatureAction>& oracle,
    const OutcomeFunction<Action, NatureAction>& g, const WeightSchedule& w,
    Stage t, std::span<const Vec> r_samples,
    std::span<const NatureAction> b_samples, double tolerance = 1e-10) {
  if (r_samples.empty() || b_samples.empty()) {
    throw std::invalid_argument("CheckBlackwellCondition: empty samples");
  }
  BlackwellConditionReport report;
  report.tolerance = tolerance;
  for (std::size_t ri = 0; ri < r_samples.size(); ++ri) {
    const Vec residual = NegOrthantResidual(r_samples[ri]);
    const Action a = oracle(t, g, r_samples[ri]);
    for (std::size_t bi = 0; bi < b_samples.size(); ++bi) {
      const double delta = WeightedDot(w, t, g(a, b_samples[bi]), residual);
      ++report.evaluated;
      if (delta > report.max_delta) {
        report.max_delta = delta;
        report.worst_r = ri;
        report.worst_b = bi;
      }
    }
  }
  return report;
}

template <typename Action>
struct DualWitness {
  std::size_t family_index;
  std::size_t nature_index;
  std::optional<Action> grid_witness;      // first grid action in the orthant
  std::optional<Action> analytic_witness;  // supplied closed form, if any
  bool analytic_valid = false;
};

template <typename Action>
struct DualConditionReport {
  std::vector<DualWitness<Action>> entries;
  std::size_t failures = 0;  // (g, b) pairs with no witness of either kind
  bool pass() const { return failures == 0; }
};

inline bool InNegOrthant(std::span<const double> v, double tolerance) {
  for (double x : v) {
    if (x > tolerance) return false;
  }
  return true;
}

// For every (g, b) searches `action_grid` in order for a with g(a, b) in the
// orthant (componentwise <= tolerance). `analytic`, when given, proposes a
// witness which is verified the same way.
template <typename Action, typename NatureAction>
DualConditionReport<Action> CheckDualCondition(
    std::span<const OutcomeFunction<Action, NatureAction>> family,
    std::span<const NatureAction> nature_actions,
    std::span<const Action> action_grid,
    const std::function<std::optional<Action>(
        const OutcomeFunction<Action, NatureAction>&, const NatureAction&)>&
        analytic = nullptr,
    double tolerance = 1e-12) {
  DualConditionReport<Action> report;
  for (std::size_t gi = 0; gi < family.size(); ++gi) {
    const auto& g = family[gi];
    for (std::size_t bi = 0; bi < nature_actions.size(); ++bi) {
      const NatureAction& b = nature_actions[bi];
      DualWitness<Action> entry{gi, bi, std::nullopt, std::nullopt, false};
      for (const Action& a : action_grid) {
        if (InNegOrthant(g(a, b), tolerance)) {
          entry.grid_witness = a;
          break;
        }
      }
      if (analytic) {
        entry.analytic_witness = analytic(g, b);
        entry.analytic_valid =
            entry.analytic_witness.has_value() &&
            InNegOrthant(g(*entry.analytic_witness, b), tolerance);
      }
      if (!entry.grid_witness && !entry.analytic_valid) ++report.failures;
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

// n + 1 evenly spaced points covering [lo, hi], with n = ceil((hi-lo)/step).
std::vector<double> UniformGrid(double lo, double hi, double step);

// CSV: t, a_t, b_t, r_t^(1..d), norm_sq_t, cum_R^(1..d). Action types must
// be fmt-formattable.
template <typename Action, typename NatureAction>
void WriteRunnerLogCsv(std::ostream& os, int dims,
                       std::span<const StepLog<Action, NatureAction>> log) {
  os << "t,a_t,b_t";
  for (int i = 1; i <= dims; ++i) os << ",r" << i;
  os << ",norm_sq_t";
  for (int i = 1; i <= dims; ++i) os << ",cum_R" << i;
  os << '\n';
  Vec cum(dims, 0.0);
  for (const auto& rec : log) {
    if (rec.outcome.size() != static_cast<std::size_t>(dims)) {
      throw std::invalid_argument("WriteRunnerLogCsv: dimension mismatch");
    }
    os << fmt::format("{},{},{}", rec.t, rec.action, rec.nature);
    for (int i = 0; i < dims; ++i) os << fmt::format(",{}", rec.outcome[i]);
    os << fmt::format(",{}", rec.norm_sq);
    for (int i = 0; i < dims; ++i) {
      cum[i] += rec.outcome[i];
      os << fmt::format(",{}", cum[i]);
    }
    os << '\n';
  }
}

template <typename Action, typename NatureAction>
void WriteRunnerLogCsv(std::ostream& os,
                       const BlackwellRunner<Action, NatureAction>& runner) {
  if (!runner.logging()) {
    throw std::logic_error(
        "WriteRunnerLogCsv: runner was built without logging");
  }
  WriteRunnerLogCsv<Action, NatureAction>(os, runner.weights().dims(),
                                          runner.log());
}

}  // namespace blackwell

#endif  // BLACKWELL_APPROACHABILITY_H_
