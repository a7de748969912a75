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

#ifndef BLACKWELL_HARNESS_H_
#define BLACKWELL_HARNESS_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blackwell/bigmatch.h"
#include "json.hpp"

namespace blackwell::harness {

using nlohmann::json;

// Invalid experiment configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Output could not be written; also exit code 2.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { kSimulate, kVerify, kSweep };
enum class OutputFormat { kCsv, kJson };

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

struct GridPoint {
  double epsilon;
  Stage horizon;
  bool operator==(const GridPoint&) const = default;
};

// Adversary spec strings are those of bigmatch::Adversary::Parse, plus
// "mixed", which cycles trial k through kMixedAdversaries[k mod 5].
inline constexpr std::string_view kMixedAdversary = "mixed";
inline constexpr std::string_view kMixedAdversaries[] = {
    "zero", "one", "iid:0.5", "periodic:01", "spiteful"};

struct ExperimentConfig {
  double epsilon = 0.5;
  Stage horizon = 512;
  std::int64_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::string adversary = "iid:0.5";
  Mode mode = Mode::kVerify;
  std::string output_path;  // empty: stdout only
  OutputFormat format = OutputFormat::kJson;
  bool break_oracle = false;
  std::vector<GridPoint> grid;
  std::string trajectory_csv;  // optional dump of trial 0
  std::string runner_log_csv;  // optional runner log of trial 0
  int threads = 0;             // 0: hardware concurrency

  bool operator==(const ExperimentConfig&) const = default;
};

std::string_view ToString(Mode mode);
std::string_view ToString(OutputFormat format);
Mode ParseMode(std::string_view s);
OutputFormat ParseFormat(std::string_view s);
// "eps:T,eps:T,..."
std::vector<GridPoint> ParseGrid(std::string_view s);

// Throws ConfigError.
void Validate(const ExperimentConfig& config);

json ToJson(const ExperimentConfig& config);
ExperimentConfig ConfigFromJson(const json& j);

bigmatch::Adversary AdversaryForTrial(const ExperimentConfig& config,
                                      double epsilon, std::int64_t trial);

struct TrialResult {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  std::string adversary;
  double payoff_direct = 0.0;
  double payoff_identity = 0.0;
  bigmatch::ThreeTermSplit terms{};
  double sum_alpha_x = 0.0;
  bool absorbed = false;
  bigmatch::TrajectoryChecks checks{};
};

// Plays config.trials trajectories at (epsilon, horizon). Trials may run on
// several threads; the result is ordered by trial index and independent of
// scheduling.
std::vector<TrialResult> RunTrials(const ExperimentConfig& config,
                                   double epsilon, Stage horizon);

bigmatch::Policy PolicyFor(const ExperimentConfig& config);

struct Summary {
  std::int64_t n_trials = 0;
  double gamma_hat = 0.0;
  double std_error = 0.0;
  double double_sum_max = 0.0;
  double stop_term_max = 0.0;
  double energy_max = 0.0;
  double distance_max_violation =
      0.0;                      // max over trials and stages of lhs - rhs
  double absorption_gap = 0.0;  // mean(sum alpha x) - absorption freq
};

Summary Summarize(std::span<const TrialResult> trials);
json ToJson(const Summary& summary, const ExperimentConfig& config);

// Trial rows: trial, seed, adversary, payoff_direct, payoff_identity, term1,
// term2, term3, sum_alpha_x, absorbed, neg_double_sum, neg_stop_term, energy,
// distance_max_excess.
void WriteTrialsCsv(std::ostream& os, std::span<const TrialResult> trials);

// t, x_t, y_t, i_t, j_t, omega_t, alpha_t, r1, r2, payoff_t.
void WriteTrajectoryCsv(std::ostream& os, const bigmatch::Trajectory& traj);

struct SimulationResult {
  std::vector<TrialResult> trials;
  Summary summary;
};

SimulationResult Simulate(const ExperimentConfig& config);
// The content written to output_path: JSON {summary, trials} or trial CSV.
std::string RenderSimulation(const ExperimentConfig& config,
                             const SimulationResult& result);
// Simulate, then write output_path (and <output_path>.summary.json for CSV)
// plus the optional trajectory and runner-log dumps of trial 0.
Summary RunSimulate(const ExperimentConfig& config);

enum class CheckStatus { kPass, kFail, kSkipped };
std::string_view ToString(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status;
  double observed;  // worst observed value
  double bound;     // observed must be <= bound
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::size_t failures() const;
  bool ok() const { return failures() == 0; }
};

VerifyReport RunVerify(const ExperimentConfig& config);
std::string FormatReport(const VerifyReport& report);
json ToJson(const VerifyReport& report);

struct SweepRow {
  double epsilon = 0.0;
  Stage horizon = 0;
  std::int64_t trials = 0;
  bool threshold_met = false;  // T >= epsilon^-8
  Summary summary;
  double payoff_bound = 0.0;    // -9 eps
  double double_sum_cap = 0.0;  // 3 eps
  double stop_term_cap = 0.0;   // 3 T^(-1/4)
  double energy_bound = 0.0;    // 9 eps^2
  bool deterministic_pass = false;
};

std::vector<SweepRow> RunSweep(const ExperimentConfig& config,
                               std::vector<GridPoint> grid);
void WriteSweepCsv(std::ostream& os, std::span<const SweepRow> rows);

// Runs the configured mode and writes its outputs. Returns the exit code:
// 0 pass, 1 check failure, 2 configuration or output error.
int Execute(const ExperimentConfig& config, std::ostream& out,
            std::ostream& err);

}  // namespace blackwell::harness

#endif  // BLACKWELL_HARNESS_H_
