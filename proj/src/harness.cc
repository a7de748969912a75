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

#include "blackwell/harness.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "blackwell/approachability.h"
#include "blackwell/rng.h"
#include "blackwell/stats.h"

namespace blackwell::harness {
namespace {

using bigmatch::Adversary;
using bigmatch::LambdaSchedule;
using bigmatch::Policy;
using bigmatch::Trajectory;
namespace tol = bigmatch::tolerance;

constexpr std::uint64_t kConditionSamplerStream = 0xb1ac'c0de'0000'0001ULL;
constexpr std::uint64_t kDualSamplerStream = 0xb1ac'c0de'0000'0002ULL;

double ParseDouble(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("bad {} '{}'", what, s));
  }
  return v;
}

Stage ParseStage(std::string_view s, std::string_view what) {
  Stage v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("bad {} '{}'", what, s));
  }
  return v;
}

void ValidatePoint(double epsilon, Stage horizon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ConfigError(
        fmt::format("epsilon must lie in (0, 1], got {}", epsilon));
  }
  if (horizon < 1) {
    throw ConfigError(fmt::format("horizon must be >= 1, got {}", horizon));
  }
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot open '" + path + "' for writing");
  return file;
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream file = OpenOutput(path);
  file << content;
  file.flush();
  if (!file) throw OutputError("failed writing '" + path + "'");
}

double MaxOf(std::span<const TrialResult> trials,
             double (*field)(const TrialResult&)) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) best = std::max(best, field(t));
  return best;
}

CheckResult Compare(std::string name, double observed, double bound,
                    std::string detail = {}) {
  return {std::move(name),
          observed <= bound ? CheckStatus::kPass : CheckStatus::kFail, observed,
          bound, std::move(detail)};
}

// Per-trajectory consequences of the construction, maximized over trials.
std::vector<CheckResult> DeterministicChecks(
    std::span<const TrialResult> trials, double epsilon, Stage horizon) {
  const double stop_term_cap =
      3.0 * std::pow(static_cast<double>(horizon), -0.25);
  std::vector<CheckResult> out;
  out.push_back(Compare(
      "strategy_bound",
      MaxOf(trials,
            [](const TrialResult& t) { return t.checks.max_x_minus_lambda; }),
      0.0, "max_t x_t - eps t^-3/4"));
  out.push_back(Compare(
      "oracle_exactness",
      MaxOf(
          trials,
          [](const TrialResult& t) { return t.checks.max_scaled_oracle_dot; }),
      tol::kOracleDot, "|<r_t, R~_{t-1}>_(t)| / (1 + |R~|^2)"));
  out.push_back(Compare(
      "distance_anytime",
      MaxOf(trials,
            [](const TrialResult& t) { return t.checks.distance_max_excess; }),
      tol::kAnytimeBound, "max_t ||R~_t||_(t)/t - sqrt(E_t)/t"));
  out.push_back(Compare("coordinate_bound_1",
                        MaxOf(trials,
                              [](const TrialResult& t) {
                                return t.checks.coordinate_max_excess[0];
                              }),
                        tol::kAnytimeBound, "max_t R_t^(1)/t - sqrt(E_t)/t"));
  out.push_back(Compare("coordinate_bound_2",
                        MaxOf(trials,
                              [](const TrialResult& t) {
                                return t.checks.coordinate_max_excess[1];
                              }),
                        tol::kAnytimeBound,
                        "max_t R_t^(2)/t - sqrt(E_t)/(t lambda_t)"));
  out.push_back(Compare("stage_energy",
                        MaxOf(trials,
                              [](const TrialResult& t) {
                                return t.checks.max_stage_energy_excess;
                              }),
                        tol::kStageEnergy,
                        "max_t ||r_t||_(t)^2 - 3 lambda_t^2"));
  out.push_back(Compare(
      "energy_bound",
      MaxOf(trials,
            [](const TrialResult& t) { return t.checks.max_energy_excess; }),
      tol::kEnergy, "max_t E_t - 9 eps^2"));
  out.push_back(Compare("double_sum_bound",
                        MaxOf(trials,
                              [](const TrialResult& t) {
                                return t.checks.payoff_terms.neg_double_sum;
                              }),
                        3.0 * epsilon + tol::kPayoffTerms, "bound 3 eps"));
  out.push_back(Compare("stop_term_bound",
                        MaxOf(trials,
                              [](const TrialResult& t) {
                                return t.checks.payoff_terms.neg_stop_term;
                              }),
                        stop_term_cap + tol::kPayoffTerms, "bound 3 T^-1/4"));
  out.push_back(Compare(
      "three_term_identity",
      MaxOf(trials,
            [](const TrialResult& t) { return t.checks.three_term_residual; }),
      tol::kIdentity, "|identity - (term1 + term2 + term3)|"));
  out.push_back(Compare(
      "ledger_consistency",
      MaxOf(trials,
            [](const TrialResult& t) { return t.checks.ledger_rel_error; }),
      tol::kIdentity, "runner R_t, energy, alpha vs second pass"));
  out.push_back(Compare(
      "strategy_reconstruction",
      MaxOf(trials,
            [](const TrialResult& t) { return t.checks.reconstruction_error; }),
      tol::kReconstruction, "logged x_t vs closed form from j_1..j_{t-1}"));
  return out;
}

// Samples residual directions and family members at several stages and
// evaluates Blackwell's condition for the configured oracle.
CheckResult BlackwellConditionCheck(const ExperimentConfig& config,
                                    const LambdaSchedule& schedule,
                                    Stage horizon) {
  const bigmatch::AuxOracle oracle = config.break_oracle
                                         ? bigmatch::MakeBrokenOracle()
                                         : bigmatch::MakeOracle(schedule);
  const WeightSchedule weights = schedule.Weights();
  Rng rng(DeriveTrialSeed(config.master_seed, kConditionSamplerStream));

  std::vector<Vec> r_samples = {{0.0, 1.0}, {1.0, 0.0},  {0.0, 0.0},
                                {1.0, 1.0}, {-1.0, 2.0}, {3.0, -2.0}};
  for (int k = 0; k < 256; ++k) {
    const double scale = std::pow(10.0, 6.0 * rng.Uniform() - 3.0);
    r_samples.push_back({scale * (2.0 * rng.Uniform() - 1.0),
                         scale * (2.0 * rng.Uniform() - 1.0)});
  }
  const std::vector<int> b_samples = {0, 1};
  const std::vector<Stage> stages = {1, 2, 3, 10, 100, horizon};

  double max_delta = -std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  double tolerance = 0.0;
  for (Stage t : stages) {
    const double lambda_t = schedule(t);
    for (double alpha : {1.0, 0.37, 1e-3}) {
      for (double lambda : {lambda_t, 1.0, 0.5 * (lambda_t + 1.0)}) {
        const auto g = bigmatch::MakeAuxFunction(alpha, lambda);
        const auto report = CheckBlackwellCondition<double, int>(
            oracle, g, weights, t, r_samples, b_samples);
        max_delta = std::max(max_delta, report.max_delta);
        evaluated += report.evaluated;
        tolerance = report.tolerance;
      }
    }
  }
  return Compare("blackwell_condition", max_delta, tolerance,
                 fmt::format("{} sampled (t, g, R, j){}", evaluated,
                             config.break_oracle ? ", broken oracle" : ""));
}

CheckResult DualConditionCheck(const ExperimentConfig& config) {
  Rng rng(DeriveTrialSeed(config.master_seed, kDualSamplerStream));
  std::vector<bigmatch::AuxFunction> family;
  for (int k = 0; k < 100; ++k) {
    const double alpha = 1.0 - rng.Uniform();   // (0, 1]
    const double lambda = 1.0 - rng.Uniform();  // (0, 1]
    family.push_back(bigmatch::MakeAuxFunction(alpha, lambda));
  }
  constexpr double kResolution = 1e-3;
  const std::vector<double> grid = UniformGrid(0.0, 1.0, kResolution);
  const std::vector<int> nature = {0, 1};
  const auto analytic = [](const bigmatch::AuxFunction& g,
                           const int& j) -> std::optional<double> {
    return j == 0 ? 0.0 : g.params[1];
  };
  const auto report =
      CheckDualCondition<double, int>(family, nature, grid, analytic);
  double worst_gap = 0.0;
  std::size_t mismatched = report.failures;
  for (const auto& e : report.entries) {
    if (!e.grid_witness || !e.analytic_valid) {
      ++mismatched;
      worst_gap = std::numeric_limits<double>::infinity();
      continue;
    }
    worst_gap =
        std::max(worst_gap, std::abs(*e.grid_witness - *e.analytic_witness));
  }
  CheckResult result = Compare("dual_condition", worst_gap, kResolution,
                               fmt::format("{} (g, j) pairs, grid step {}",
                                           report.entries.size(), kResolution));
  if (mismatched > 0) result.status = CheckStatus::kFail;
  return result;
}

CheckResult Skipped(std::string name, std::size_t n) {
  return {std::move(name), CheckStatus::kSkipped, 0.0, 0.0,
          fmt::format("{} trials < {}", n, tol::kMinStatisticalTrials)};
}

CheckResult FromStat(std::string name, const bigmatch::StatCheck& stat,
                     std::string detail) {
  return {std::move(name),
          stat.skipped
              ? CheckStatus::kSkipped
              : (stat.pass() ? CheckStatus::kPass : CheckStatus::kFail),
          stat.observed, stat.allowed,
          fmt::format("{}; se {}", detail, stat.std_error)};
}

std::vector<CheckResult> StatisticalChecks(std::span<const TrialResult> trials,
                                           double epsilon, Stage horizon) {
  std::vector<CheckResult> out;
  const std::size_t n = trials.size();
  if (n < tol::kMinStatisticalTrials) {
    for (const char* name : {"payoff_identity", "absorption_identity",
                             "residual_term_magnitude", "payoff_guarantee"}) {
      out.push_back(Skipped(name, n));
    }
    return out;
  }
  std::vector<double> direct, identity, residual;
  std::vector<bigmatch::AbsorptionSample> absorption;
  for (const auto& t : trials) {
    direct.push_back(t.payoff_direct);
    identity.push_back(t.payoff_identity);
    residual.push_back(t.terms.residual);
    absorption.push_back({t.sum_alpha_x, t.absorbed});
  }
  out.push_back(FromStat("payoff_identity",
                         bigmatch::PayoffIdentityCheck(direct, identity),
                         "|mean direct - mean identity| vs 4 pooled se"));
  out.push_back(
      FromStat("absorption_identity", bigmatch::AbsorptionCheck(absorption),
               "|mean sum alpha x - absorbed freq| vs 4 binomial se"));
  const LambdaSchedule schedule(epsilon);
  const double residual_cap =
      (2.0 + 1.0 / schedule(horizon)) / static_cast<double>(horizon);
  out.push_back(
      FromStat("residual_term_magnitude",
               bigmatch::ResidualTermCheck(residual, residual_cap),
               fmt::format("|mean term3| vs {} + 4 se", residual_cap)));

  const MeanEstimate gamma = Estimate(direct);
  const double threshold = std::pow(epsilon, -8.0);
  if (static_cast<double>(horizon) >= threshold) {
    out.push_back(Compare("payoff_guarantee",
                          -(gamma.mean + 4.0 * gamma.std_error), 9.0 * epsilon,
                          fmt::format("gamma_hat {} vs -9 eps", gamma.mean)));
  } else {
    out.push_back({"payoff_guarantee", CheckStatus::kSkipped, gamma.mean,
                   -9.0 * epsilon,
                   fmt::format("T < eps^-8 = {}; reported only", threshold)});
  }
  return out;
}

void RunChunk(const ExperimentConfig& config, const LambdaSchedule& schedule,
              Stage horizon, const Policy& policy, std::int64_t begin,
              std::int64_t end, std::vector<TrialResult>& results) {
  for (std::int64_t k = begin; k < end; ++k) {
    const Adversary adversary =
        AdversaryForTrial(config, schedule.epsilon(), k);
    TrialResult& res = results[static_cast<std::size_t>(k)];
    res.trial = k;
    res.seed =
        DeriveTrialSeed(config.master_seed, static_cast<std::uint64_t>(k));
    res.adversary = adversary.Describe();
    const Trajectory traj = bigmatch::PlayTrajectory(schedule, adversary,
                                                     horizon, res.seed, policy);
    res.payoff_direct = bigmatch::PayoffDirect(traj);
    res.payoff_identity = bigmatch::PayoffIdentitySample(traj);
    res.terms = bigmatch::SplitThreeTerms(traj);
    res.sum_alpha_x = bigmatch::SumAlphaX(traj);
    res.absorbed = traj.absorbed();
    res.checks = bigmatch::CheckTrajectory(traj, schedule);
  }
}

std::string Num(double v) { return fmt::format("{}", v); }

}  // namespace

std::string_view ToString(Mode mode) {
  switch (mode) {
    case Mode::kSimulate:
      return "simulate";
    case Mode::kVerify:
      return "verify";
    case Mode::kSweep:
      return "sweep";
  }
  return "?";
}

std::string_view ToString(OutputFormat format) {
  return format == OutputFormat::kCsv ? "csv" : "json";
}

std::string_view ToString(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass:
      return "PASS";
    case CheckStatus::kFail:
      return "FAIL";
    case CheckStatus::kSkipped:
      return "SKIPPED";
  }
  return "?";
}

Mode ParseMode(std::string_view s) {
  if (s == "simulate") return Mode::kSimulate;
  if (s == "verify") return Mode::kVerify;
  if (s == "sweep") return Mode::kSweep;
  throw ConfigError(fmt::format("unknown mode '{}'", s));
}

OutputFormat ParseFormat(std::string_view s) {
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "json") return OutputFormat::kJson;
  throw ConfigError(fmt::format("unknown format '{}'", s));
}

std::vector<GridPoint> ParseGrid(std::string_view s) {
  std::vector<GridPoint> grid;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view item = s.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError(fmt::format("grid entry '{}' is not eps:T", item));
    }
    grid.push_back({ParseDouble(item.substr(0, colon), "grid epsilon"),
                    ParseStage(item.substr(colon + 1), "grid horizon")});
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return grid;
}

void Validate(const ExperimentConfig& config) {
  ValidatePoint(config.epsilon, config.horizon);
  if (config.trials < 1) {
    throw ConfigError(
        fmt::format("trials must be >= 1, got {}", config.trials));
  }
  if (config.threads < 0) throw ConfigError("threads must be >= 0");
  if (config.adversary != kMixedAdversary) {
    try {
      Adversary::Parse(config.adversary, config.epsilon);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (config.mode == Mode::kSweep && config.grid.empty()) {
    throw ConfigError("sweep needs a nonempty --grid");
  }
  for (const auto& p : config.grid) ValidatePoint(p.epsilon, p.horizon);
}

json ToJson(const ExperimentConfig& config) {
  json grid = json::array();
  for (const auto& p : config.grid) {
    grid.push_back({{"epsilon", p.epsilon}, {"horizon", p.horizon}});
  }
  return {{"epsilon", config.epsilon},
          {"horizon", config.horizon},
          {"trials", config.trials},
          {"master_seed", config.master_seed},
          {"adversary", config.adversary},
          {"mode", ToString(config.mode)},
          {"output_path", config.output_path},
          {"format", ToString(config.format)},
          {"break_oracle", config.break_oracle},
          {"grid", grid},
          {"trajectory_csv", config.trajectory_csv},
          {"runner_log_csv", config.runner_log_csv},
          {"threads", config.threads}};
}

ExperimentConfig ConfigFromJson(const json& j) {
  ExperimentConfig c;
  try {
    c.epsilon = j.at("epsilon").get<double>();
    c.horizon = j.at("horizon").get<Stage>();
    c.trials = j.at("trials").get<std::int64_t>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.adversary = j.at("adversary").get<std::string>();
    c.mode = ParseMode(j.at("mode").get<std::string>());
    c.output_path = j.value("output_path", "");
    c.format = ParseFormat(j.value("format", "json"));
    c.break_oracle = j.value("break_oracle", false);
    for (const auto& p : j.value("grid", json::array())) {
      c.grid.push_back(
          {p.at("epsilon").get<double>(), p.at("horizon").get<Stage>()});
    }
    c.trajectory_csv = j.value("trajectory_csv", "");
    c.runner_log_csv = j.value("runner_log_csv", "");
    c.threads = j.value("threads", 0);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

Adversary AdversaryForTrial(const ExperimentConfig& config, double epsilon,
                            std::int64_t trial) {
  if (config.adversary == kMixedAdversary) {
    constexpr auto kCount = std::size(kMixedAdversaries);
    return Adversary::Parse(
        kMixedAdversaries[static_cast<std::size_t>(trial) % kCount], epsilon);
  }
  return Adversary::Parse(config.adversary, epsilon);
}

Policy PolicyFor(const ExperimentConfig& config) {
  return config.break_oracle ? Policy::BrokenOracle()
                             : Policy::Approachability();
}

std::vector<TrialResult> RunTrials(const ExperimentConfig& config,
                                   double epsilon, Stage horizon) {
  ValidatePoint(epsilon, horizon);
  const LambdaSchedule schedule(epsilon);
  const Policy policy = PolicyFor(config);
  const std::int64_t n = config.trials;
  std::vector<TrialResult> results(static_cast<std::size_t>(n));

  std::int64_t workers =
      config.threads > 0 ? config.threads
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    RunChunk(config, schedule, horizon, policy, 0, n, results);
    return results;
  }
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (std::int64_t begin = 0; begin < n; begin += chunk) {
      const std::int64_t end = std::min(n, begin + chunk);
      pool.emplace_back([&, begin, end] {
        try {
          RunChunk(config, schedule, horizon, policy, begin, end, results);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

Summary Summarize(std::span<const TrialResult> trials) {
  Summary s;
  s.n_trials = static_cast<std::int64_t>(trials.size());
  if (trials.empty()) return s;
  std::vector<double> direct;
  direct.reserve(trials.size());
  double mass = 0.0;
  double absorbed = 0.0;
  for (const auto& t : trials) {
    direct.push_back(t.payoff_direct);
    mass += t.sum_alpha_x;
    absorbed += t.absorbed ? 1.0 : 0.0;
  }
  const MeanEstimate est = Estimate(direct);
  s.gamma_hat = est.mean;
  s.std_error = est.std_error;
  s.double_sum_max = MaxOf(trials, [](const TrialResult& t) {
    return t.checks.payoff_terms.neg_double_sum;
  });
  s.stop_term_max = MaxOf(trials, [](const TrialResult& t) {
    return t.checks.payoff_terms.neg_stop_term;
  });
  s.energy_max = MaxOf(trials, [](const TrialResult& t) {
    return t.checks.payoff_terms.energy;
  });
  s.distance_max_violation = MaxOf(trials, [](const TrialResult& t) {
    return t.checks.distance_max_excess;
  });
  const double n = static_cast<double>(trials.size());
  s.absorption_gap = mass / n - absorbed / n;
  return s;
}

json ToJson(const Summary& summary, const ExperimentConfig& config) {
  return {{"config", ToJson(config)},
          {"n_trials", summary.n_trials},
          {"gamma_hat", summary.gamma_hat},
          {"stderr", summary.std_error},
          {"eq5_max", summary.double_sum_max},
          {"eq6_max", summary.stop_term_max},
          {"energy_max", summary.energy_max},
          {"thm1_max_violation", summary.distance_max_violation},
          {"absorption_gap", summary.absorption_gap},
          {"rng", kRngDescription}};
}

void WriteTrialsCsv(std::ostream& os, std::span<const TrialResult> trials) {
  os << "trial,seed,adversary,payoff_direct,payoff_identity,term1,term2,term3,"
        "sum_alpha_x,absorbed,neg_double_sum,neg_stop_term,energy,distance_max_"
        "excess\n";
  for (const auto& t : trials) {
    os << fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", t.trial, t.seed,
        t.adversary, t.payoff_direct, t.payoff_identity, t.terms.double_sum,
        t.terms.stop_term, t.terms.residual, t.sum_alpha_x, t.absorbed ? 1 : 0,
        t.checks.payoff_terms.neg_double_sum,
        t.checks.payoff_terms.neg_stop_term, t.checks.payoff_terms.energy,
        t.checks.distance_max_excess);
  }
}

void WriteTrajectoryCsv(std::ostream& os, const Trajectory& traj) {
  os << "t,x_t,y_t,i_t,j_t,omega_t,alpha_t,r1,r2,payoff_t\n";
  for (const auto& rec : traj.stages) {
    os << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", rec.t, rec.x, rec.y,
                      rec.i, rec.j, bigmatch::ToString(rec.omega), rec.alpha,
                      rec.r[0], rec.r[1], rec.payoff);
  }
}

SimulationResult Simulate(const ExperimentConfig& config) {
  Validate(config);
  SimulationResult result;
  result.trials = RunTrials(config, config.epsilon, config.horizon);
  result.summary = Summarize(result.trials);
  return result;
}

std::string RenderSimulation(const ExperimentConfig& config,
                             const SimulationResult& result) {
  std::ostringstream os;
  if (config.format == OutputFormat::kCsv) {
    WriteTrialsCsv(os, result.trials);
    return os.str();
  }
  json trials = json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"trial", t.trial},
                      {"seed", t.seed},
                      {"adversary", t.adversary},
                      {"payoff_direct", t.payoff_direct},
                      {"payoff_identity", t.payoff_identity},
                      {"term1", t.terms.double_sum},
                      {"term2", t.terms.stop_term},
                      {"term3", t.terms.residual},
                      {"sum_alpha_x", t.sum_alpha_x},
                      {"absorbed", t.absorbed},
                      {"neg_double_sum", t.checks.payoff_terms.neg_double_sum},
                      {"neg_stop_term", t.checks.payoff_terms.neg_stop_term},
                      {"energy", t.checks.payoff_terms.energy},
                      {"distance_max_excess", t.checks.distance_max_excess}});
  }
  json doc = {{"summary", ToJson(result.summary, config)}, {"trials", trials}};
  return doc.dump(2) + "\n";
}

Summary RunSimulate(const ExperimentConfig& config) {
  const SimulationResult result = Simulate(config);
  if (!config.output_path.empty()) {
    WriteFile(config.output_path, RenderSimulation(config, result));
    if (config.format == OutputFormat::kCsv) {
      WriteFile(config.output_path + ".summary.json",
                ToJson(result.summary, config).dump(2) + "\n");
    }
  }
  if (!config.trajectory_csv.empty() || !config.runner_log_csv.empty()) {
    const LambdaSchedule schedule(config.epsilon);
    bigmatch::RunnerLog log;
    const Trajectory traj = bigmatch::PlayTrajectory(
        schedule, AdversaryForTrial(config, config.epsilon, 0), config.horizon,
        DeriveTrialSeed(config.master_seed, 0), PolicyFor(config), &log);
    if (!config.trajectory_csv.empty()) {
      std::ostringstream os;
      WriteTrajectoryCsv(os, traj);
      WriteFile(config.trajectory_csv, os.str());
    }
    if (!config.runner_log_csv.empty()) {
      std::ostringstream os;
      WriteRunnerLogCsv<double, int>(os, 2, log);
      WriteFile(config.runner_log_csv, os.str());
    }
  }
  return result.summary;
}

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(),
      [](const CheckResult& c) { return c.status == CheckStatus::kFail; }));
}

VerifyReport RunVerify(const ExperimentConfig& config) {
  Validate(config);
  const LambdaSchedule schedule(config.epsilon);
  const std::vector<TrialResult> trials =
      RunTrials(config, config.epsilon, config.horizon);

  VerifyReport report;
  report.checks = DeterministicChecks(trials, config.epsilon, config.horizon);
  report.checks.push_back(Compare(
      "weights_nonincreasing",
      schedule.Weights().IsPositiveNonincreasing(config.horizon) ? 0.0 : 1.0,
      0.0, "mu^(1) = 1, mu^(2) = lambda_t over 1..T"));
  report.checks.push_back(
      BlackwellConditionCheck(config, schedule, config.horizon));
  report.checks.push_back(DualConditionCheck(config));
  for (auto& c : StatisticalChecks(trials, config.epsilon, config.horizon)) {
    report.checks.push_back(std::move(c));
  }
  return report;
}

std::string FormatReport(const VerifyReport& report) {
  std::string out;
  for (const auto& c : report.checks) {
    out += fmt::format("{:<8} {:<24} observed={:<24} bound={:<24} {}\n",
                       ToString(c.status), c.name, Num(c.observed),
                       Num(c.bound), c.detail);
  }
  out += fmt::format("{} checks, {} failed\n", report.checks.size(),
                     report.failures());
  return out;
}

json ToJson(const VerifyReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"status", ToString(c.status)},
                      {"observed", c.observed},
                      {"bound", c.bound},
                      {"detail", c.detail}});
  }
  return {{"checks", checks}, {"failures", report.failures()}};
}

std::vector<SweepRow> RunSweep(const ExperimentConfig& config,
                               std::vector<GridPoint> grid) {
  if (grid.empty()) throw ConfigError("sweep needs a nonempty grid");
  for (const auto& p : grid) ValidatePoint(p.epsilon, p.horizon);
  std::sort(grid.begin(), grid.end(),
            [](const GridPoint& a, const GridPoint& b) {
              return a.epsilon != b.epsilon ? a.epsilon < b.epsilon
                                            : a.horizon < b.horizon;
            });
  std::vector<SweepRow> rows;
  for (const auto& p : grid) {
    const std::vector<TrialResult> trials =
        RunTrials(config, p.epsilon, p.horizon);
    SweepRow row;
    row.epsilon = p.epsilon;
    row.horizon = p.horizon;
    row.trials = config.trials;
    row.threshold_met =
        static_cast<double>(p.horizon) >= std::pow(p.epsilon, -8.0);
    row.summary = Summarize(trials);
    row.payoff_bound = -9.0 * p.epsilon;
    row.double_sum_cap = 3.0 * p.epsilon;
    row.stop_term_cap = 3.0 * std::pow(static_cast<double>(p.horizon), -0.25);
    row.energy_bound = 9.0 * p.epsilon * p.epsilon;
    const auto checks = DeterministicChecks(trials, p.epsilon, p.horizon);
    row.deterministic_pass = std::all_of(
        checks.begin(), checks.end(),
        [](const CheckResult& c) { return c.status == CheckStatus::kPass; });
    rows.push_back(row);
  }
  return rows;
}

void WriteSweepCsv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "epsilon,T,trials,threshold_met,gamma_hat,stderr,payoff_bound,eq5_max,"
        "eq5_bound,eq6_max,eq6_bound,energy_max,energy_bound,"
        "deterministic_pass\n";
  for (const auto& r : rows) {
    os << fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.epsilon, r.horizon,
        r.trials, r.threshold_met ? 1 : 0, r.summary.gamma_hat,
        r.summary.std_error, r.payoff_bound, r.summary.double_sum_max,
        r.double_sum_cap, r.summary.stop_term_max, r.stop_term_cap,
        r.summary.energy_max, r.energy_bound, r.deterministic_pass ? 1 : 0);
  }
}

int Execute(const ExperimentConfig& config, std::ostream& out,
            std::ostream& err) {
  try {
    Validate(config);
    switch (config.mode) {
      case Mode::kSimulate: {
        const Summary summary = RunSimulate(config);
        out << ToJson(summary, config).dump(2) << '\n';
        return kExitPass;
      }
      case Mode::kVerify: {
        const VerifyReport report = RunVerify(config);
        out << FormatReport(report);
        if (!config.output_path.empty()) {
          std::ostringstream os;
          if (config.format == OutputFormat::kJson) {
            os << ToJson(report).dump(2) << '\n';
          } else {
            os << "name,status,observed,bound,detail\n";
            for (const auto& c : report.checks) {
              os << fmt::format("{},{},{},{},\"{}\"\n", c.name,
                                ToString(c.status), c.observed, c.bound,
                                c.detail);
            }
          }
          WriteFile(config.output_path, os.str());
        }
        return report.ok() ? kExitPass : kExitCheckFailure;
      }
      case Mode::kSweep: {
        const std::vector<SweepRow> rows = RunSweep(config, config.grid);
        std::ostringstream os;
        WriteSweepCsv(os, rows);
        if (config.output_path.empty()) {
          out << os.str();
        } else {
          WriteFile(config.output_path, os.str());
        }
        const bool ok =
            std::all_of(rows.begin(), rows.end(),
                        [](const SweepRow& r) { return r.deterministic_pass; });
        return ok ? kExitPass : kExitCheckFailure;
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace blackwell::harness
