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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "blackwell/bigmatch.h"
#include "synthetic_orthant.h"

namespace blackwell {
namespace {

using Scalar = OutcomeFunction<double, int>;

Scalar Constant(Vec c) {
  return Scalar{[c](const double&, const int&) { return c; }, {}};
}

Oracle<double, int> Always(double a) {
  return [a](Stage, const Scalar&, std::span<const double>) { return a; };
}

WeightSchedule Harmonic(int d) {
  return WeightSchedule(d, [](Stage t, int i) {
    return 1.0 / (1.0 + i + static_cast<double>(t));
  });
}

TEST(BlackwellRunner, FirstStepUsesOracleAtZero) {
  Stage seen_t = 0;
  Vec seen_r;
  const Oracle<double, int> oracle = [&](Stage t, const Scalar&,
                                         std::span<const double> r) {
    seen_t = t;
    seen_r.assign(r.begin(), r.end());
    return 0.25;
  };
  BlackwellRunner<double, int> runner(WeightSchedule::Uniform(2), oracle);
  const Scalar g{[](const double& a, const int& b) { return Vec{a, a * b}; },
                 {}};
  const auto step = runner.Step(g, 3);
  EXPECT_EQ(seen_t, 1);
  EXPECT_EQ(seen_r, (Vec{0, 0}));
  EXPECT_EQ(step.action, 0.25);
  EXPECT_EQ(runner.state().cumulative, (Vec{0.25, 0.75}));
  EXPECT_EQ(runner.state().t, 1);
}

TEST(BlackwellRunner, AccumulatesConstantOutcome) {
  const Vec c = {1.5, -2.0};
  const auto w = Harmonic(2);
  BlackwellRunner<double, int> runner(w, Always(0.0), /*logging=*/true);
  runner.Step(Constant(c), 0);
  runner.Step(Constant(c), 1);
  EXPECT_EQ(runner.state().cumulative, (Vec{3.0, -4.0}));
  // ||c||_(1)^2 + ||c||_(2)^2 with mu_t^(i) = 1 / (1 + i + t).
  const double expected = 1.5 * 1.5 / 4 + 4.0 / 9 + 1.5 * 1.5 / 9 + 4.0 / 16;
  EXPECT_NEAR(runner.state().sq_ledger, expected, 1e-15);
  ASSERT_EQ(runner.log().size(), 2u);
  EXPECT_EQ(runner.log()[1].nature, 1);
}

TEST(BlackwellRunner, RejectsWrongOutcomeDimension) {
  BlackwellRunner<double, int> runner(WeightSchedule::Uniform(2), Always(0.0));
  EXPECT_THROW(runner.Step(Constant({1, 2, 3}), 0), std::invalid_argument);
  EXPECT_EQ(runner.state().t, 0);
}

TEST(BlackwellRunner, CommitAcceptsForeignAction) {
  BlackwellRunner<double, int> runner(WeightSchedule::Uniform(1), Always(0.0));
  const Scalar g{[](const double& a, const int&) { return Vec{a}; }, {}};
  runner.Commit(g, 0.75, 0);
  EXPECT_EQ(runner.state().cumulative[0], 0.75);
}

TEST(DistanceGap, RequiresAStage) {
  EXPECT_THROW(
      DistanceGap(RunnerState{0, {0.0}, 0.0}, WeightSchedule::Uniform(1)),
      std::domain_error);
}

TEST(DistanceGap, ZeroInsideOrthant) {
  BlackwellRunner<double, int> runner(Harmonic(2), Always(0.0));
  runner.Step(Constant({-1, -3}), 0);
  runner.Step(Constant({0.5, -3}), 0);
  const BoundGap gap = DistanceGap(runner.state(), runner.weights());
  EXPECT_EQ(gap.lhs, 0.0);
  EXPECT_GT(gap.rhs, 0.0);
  EXPECT_TRUE(gap.Holds());
}

TEST(DistanceGap, SingleStepIsAContraction) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 200; ++k) {
    BlackwellRunner<double, int> runner(Harmonic(3), Always(0.0));
    runner.Step(Constant({n01(gen), n01(gen), n01(gen)}), 0);
    const BoundGap gap = DistanceGap(runner.state(), runner.weights());
    EXPECT_LE(gap.lhs, gap.rhs);
  }
}

TEST(CoordinateGap, NeedsLogging) {
  BlackwellRunner<double, int> runner(WeightSchedule::Uniform(1), Always(0.0));
  runner.Step(Constant({1.0}), 0);
  EXPECT_THROW(CoordinateGap(runner, 0), std::logic_error);
}

TEST(CoordinateGap, NonpositiveOutcomesGiveNonpositiveLhs) {
  BlackwellRunner<double, int> runner(Harmonic(2), Always(0.0), true);
  for (int k = 0; k < 5; ++k) runner.Step(Constant({-0.1 * k, 0.3}), 0);
  const BoundGap gap = CoordinateGap(runner, 0);
  EXPECT_LE(gap.lhs, 0.0);
  EXPECT_GE(gap.rhs, 0.0);
  EXPECT_THROW(CoordinateGap(runner, 2), std::out_of_range);
}

TEST(CoordinateGap, OneDimensionalUnitWeightsMatchDistanceGap) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> n01;
  BlackwellRunner<double, int> runner(WeightSchedule::Uniform(1), Always(0.0),
                                      true);
  for (int k = 0; k < 50; ++k) {
    runner.Step(Constant({n01(gen)}), 0);
    const BoundGap cor = CoordinateGap(runner, 0);
    const BoundGap thm = DistanceGap(runner.state(), runner.weights());
    EXPECT_NEAR(std::max(0.0, cor.lhs), thm.lhs, 1e-15);
    EXPECT_EQ(cor.rhs, thm.rhs);
  }
}

// Ten Big Match auxiliary steps; bounds recomputed from the log alone.
TEST(DistanceGap, BigMatchRunMatchesLogRecomputation) {
  const bigmatch::LambdaSchedule schedule(0.5);
  const WeightSchedule w = schedule.Weights();
  BlackwellRunner<double, int> runner(w, bigmatch::MakeOracle(schedule), true);
  std::mt19937_64 gen(2024);
  double alpha = 1.0;
  for (Stage t = 1; t <= 10; ++t) {
    const int j = static_cast<int>(gen() & 1u);
    const auto step =
        runner.Step(bigmatch::MakeAuxFunction(alpha, schedule(t)), j);
    alpha *= 1.0 - step.action;

    double r1 = 0, r2 = 0, energy = 0;
    for (const auto& rec : runner.log()) {
      const double lam = schedule(rec.t);
      r1 += rec.outcome[0];
      r2 += rec.outcome[1];
      energy += rec.outcome[0] * rec.outcome[0] +
                lam * lam * rec.outcome[1] * rec.outcome[1];
    }
    const double lam_t = schedule(t);
    const double td = static_cast<double>(t);
    const double lhs =
        std::hypot(std::max(0.0, r1), lam_t * std::max(0.0, r2)) / td;
    const double rhs = std::sqrt(energy) / td;

    const BoundGap gap = DistanceGap(runner.state(), w);
    EXPECT_NEAR(gap.lhs, lhs, 1e-12 * (1 + lhs));
    EXPECT_NEAR(gap.rhs, rhs, 1e-12 * rhs);
    EXPECT_NEAR(runner.state().sq_ledger, energy, 1e-12 * energy);
    EXPECT_LE(gap.lhs, gap.rhs * (1 + 1e-9));
    EXPECT_TRUE(CoordinateGap(runner, 0).Holds());
    EXPECT_TRUE(CoordinateGap(runner, 1).Holds());
  }
}

TEST(BlackwellRunner, DeterministicLogs) {
  const auto run = [] {
    const bigmatch::LambdaSchedule schedule(0.3);
    BlackwellRunner<double, int> runner(schedule.Weights(),
                                        bigmatch::MakeOracle(schedule), true);
    std::mt19937_64 gen(77);
    double alpha = 1.0;
    for (Stage t = 1; t <= 200; ++t) {
      const auto step =
          runner.Step(bigmatch::MakeAuxFunction(alpha, schedule(t)),
                      static_cast<int>(gen() % 2));
      alpha *= 1.0 - step.action;
    }
    std::ostringstream os;
    WriteRunnerLogCsv(os, runner);
    return os.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(WriteRunnerLogCsv, ColumnsAndCumulativeSums) {
  BlackwellRunner<double, int> runner(WeightSchedule::Uniform(2), Always(0.5),
                                      true);
  runner.Step(Constant({1, -1}), 0);
  runner.Step(Constant({2, 0.5}), 1);
  std::ostringstream os;
  WriteRunnerLogCsv(os, runner);
  EXPECT_EQ(os.str(),
            "t,a_t,b_t,r1,r2,norm_sq_t,cum_R1,cum_R2\n"
            "1,0.5,0,1,-1,2,1,-1\n"
            "2,0.5,1,2,0.5,4.25,3,-0.5\n");
  BlackwellRunner<double, int> silent(WeightSchedule::Uniform(2), Always(0.5));
  EXPECT_THROW(WriteRunnerLogCsv(os, silent), std::logic_error);
}

TEST(CheckBlackwellCondition, BigMatchOracleIsExact) {
  const bigmatch::LambdaSchedule schedule(0.4);
  const WeightSchedule w = schedule.Weights();
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> coord(-3.0, 3.0), unit(0.0, 1.0);
  std::vector<Vec> rs;
  for (int k = 0; k < 500; ++k) rs.push_back({coord(gen), coord(gen)});
  const std::vector<int> bs = {0, 1};
  for (Stage t : {1, 2, 7, 100, 5000}) {
    const auto g = bigmatch::MakeAuxFunction(unit(gen), schedule(t));
    const auto report = CheckBlackwellCondition<double, int>(
        bigmatch::MakeOracle(schedule), g, w, t, rs, bs);
    EXPECT_TRUE(report.pass());
    EXPECT_LE(std::abs(report.max_delta), 1e-12);
    EXPECT_EQ(report.evaluated, rs.size() * bs.size());
  }
}

TEST(CheckBlackwellCondition, ResidualZeroGivesZeroDelta) {
  const bigmatch::LambdaSchedule schedule(1.0);
  const std::vector<Vec> rs = {{-1.0, -2.0}, {0.0, 0.0}};
  const std::vector<int> bs = {0, 1};
  const auto report = CheckBlackwellCondition<double, int>(
      bigmatch::MakeBrokenOracle(), bigmatch::MakeAuxFunction(1.0, 0.5),
      schedule.Weights(), 3, rs, bs);
  EXPECT_EQ(report.max_delta, 0.0);
  EXPECT_TRUE(report.pass());
}

TEST(CheckBlackwellCondition, BrokenOracleFails) {
  // R~ = (0, 1), g_{1, lambda}, j = 1, x = 0:
  // delta = lambda_t^2 * 1 * (0 / lambda - 1) * (1 - 2) = lambda_t^2.
  // With eps = 0.5 and t = 4, lambda_t^2 = 0.25 * 4^(-3/2) = 1/32.
  const bigmatch::LambdaSchedule schedule(0.5);
  const std::vector<Vec> rs = {{0.0, 1.0}};
  const std::vector<int> bs = {1};
  const auto report = CheckBlackwellCondition<double, int>(
      bigmatch::MakeBrokenOracle(), bigmatch::MakeAuxFunction(1.0, 0.7),
      schedule.Weights(), 4, rs, bs);
  EXPECT_NEAR(report.max_delta, 1.0 / 32, 1e-15);
  EXPECT_FALSE(report.pass());
  const std::vector<Vec> none;
  EXPECT_THROW(
      (CheckBlackwellCondition<double, int>(bigmatch::MakeBrokenOracle(),
                                            bigmatch::MakeAuxFunction(1.0, 0.7),
                                            schedule.Weights(), 4, none, bs)),
      std::invalid_argument);
}

TEST(CheckDualCondition, BigMatchWitnesses) {
  const std::vector<Scalar> family = {bigmatch::MakeAuxFunction(1.0, 0.37),
                                      bigmatch::MakeAuxFunction(0.2, 0.9)};
  const std::vector<int> nature = {0, 1};
  const std::vector<double> grid = UniformGrid(0.0, 1.0, 1e-3);
  const auto report = CheckDualCondition<double, int>(
      family, nature, grid, [](const Scalar& g, const int& j) {
        return std::optional<double>(j == 0 ? 0.0 : g.params[1]);
      });
  ASSERT_EQ(report.entries.size(), 4u);
  EXPECT_TRUE(report.pass());
  for (const auto& e : report.entries) {
    ASSERT_TRUE(e.grid_witness.has_value());
    EXPECT_TRUE(e.analytic_valid);
    const double lambda = family[e.family_index].params[1];
    if (e.nature_index == 0) {
      EXPECT_EQ(*e.grid_witness, 0.0);
    } else {
      EXPECT_GE(*e.grid_witness, lambda);
      EXPECT_LE(*e.grid_witness - lambda, 1e-3);
    }
  }
}

TEST(CheckDualCondition, ZeroAlphaAcceptsAnyAction) {
  const std::vector<Scalar> family = {bigmatch::MakeAuxFunction(0.0, 0.5)};
  const std::vector<int> nature = {0, 1};
  const std::vector<double> grid = {0.9, 0.1};
  const auto report = CheckDualCondition<double, int>(family, nature, grid);
  for (const auto& e : report.entries) EXPECT_EQ(*e.grid_witness, 0.9);
}

TEST(CheckDualCondition, ReportsMissingWitness) {
  // g(a, b) = (1, a): never in the orthant.
  const std::vector<Scalar> family = {
      Scalar{[](const double& a, const int&) { return Vec{1.0, a}; }, {}}};
  const std::vector<int> nature = {0};
  const std::vector<double> grid = UniformGrid(-1.0, 1.0, 0.5);
  const auto report = CheckDualCondition<double, int>(family, nature, grid);
  EXPECT_FALSE(report.pass());
  EXPECT_EQ(report.failures, 1u);
}

TEST(UniformGrid, CoversEndpoints) {
  const auto grid = UniformGrid(0.0, 1.0, 1e-3);
  ASSERT_EQ(grid.size(), 1001u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), 1.0);
  EXPECT_NEAR(grid[500], 0.5, 1e-15);
  EXPECT_EQ(UniformGrid(0.2, 0.2, 0.1).size(), 1u);
  EXPECT_THROW(UniformGrid(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(AnytimeBoundMonitor, SignInstanceHoldsEveryStage) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto run = testing::RunSignInstance(3, 200, seed, 0.0, 1e-9);
    EXPECT_EQ(run.monitor.stages(), 200);
    EXPECT_TRUE(run.monitor.AllHold()) << "seed " << seed;
    EXPECT_LE(run.monitor.distance_max_excess(), 1e-9);
    for (int i = 0; i < 3; ++i) {
      EXPECT_LE(run.monitor.coordinate_max_excess(i), 1e-9);
    }
  }
}

TEST(AnytimeBoundMonitor, FlagsAnOracleThatPushesTheWrongWay) {
  // Always moving up: R_t = t c, distance grows like t while sqrt(ledger)
  // grows like sqrt(t).
  BlackwellRunner<double, int> runner(WeightSchedule::Uniform(2), Always(0.0));
  AnytimeBoundMonitor monitor(2);
  for (int k = 0; k < 10; ++k) {
    runner.Step(Constant({1.0, 1.0}), 0);
    monitor.Observe(runner.state(), runner.weights());
  }
  EXPECT_FALSE(monitor.AllHold());
  EXPECT_GT(monitor.distance_violations(), 0u);
  EXPECT_GT(monitor.coordinate_violations(0), 0u);
}

}  // namespace
}  // namespace blackwell
