#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scos/baselines.hpp"
#include "scos/dist_rl.hpp"
#include "scos/rollout.hpp"
#include "scos/scenario.hpp"
#include "scos/value_learning.hpp"

namespace scos {

enum class PolicyId {
  kTsGreedy,
  kTsEps,
  kTsSoftmax,
  kTsDrl,
  kRoOptimism,
  kRoHindsight,
  kPenaltyRd,
  kPenaltyDt,
};

// A policy plus the belief model it runs on. The textual form appends
// ":marginal" for the independence-coarsened belief, e.g. "ts-greedy:marginal".
struct PolicySpec {
  PolicyId id = PolicyId::kTsGreedy;
  CorrelationMode belief = CorrelationMode::kFull;

  std::string name() const;
  bool trained() const;
  static PolicySpec parse(const std::string& s);
};

std::vector<PolicySpec> all_policies();

struct HarnessConfig {
  OpiConfig opi;
  double delta = 1.0;
  RolloutConfig rollout;
  EpisodeConfig episode;
  std::uint64_t seed = 0;
  int workers = 1;

  nlohmann::json to_json() const;
  static HarnessConfig from_json(const nlohmann::json& j);
};

struct TrainedModel {
  BaseModel base;
  TrainingLog log;
  nlohmann::json to_json() const;
};

// Everything needed to evaluate one environment of a scenario set.
struct Instance {
  const ScenarioSpec* spec;
  const Environment* env;
  LatticeWorld world;
  SensorModel sensor;
  PlanningContext ctx;

  Instance(const ScenarioSpec& s, const Environment& e);
  Instance(const Instance&) = delete;
};

std::uint64_t setting_hash(const ScenarioSpec& spec);

TrainedModel train_policy(const PolicySpec& policy, const Instance& inst, const HarnessConfig& cfg);
std::unique_ptr<Policy> make_policy(const PolicySpec& policy, const TrainedModel* model,
                                    const HarnessConfig& cfg);

double optimal_oracle(const LatticeWorld& world, const Statuses& truth);

struct RunResult {
  std::string policy;
  std::string setting;
  double lambda = 0.0;
  double range = 0.0;
  int obstacles = 0;
  std::string grid;
  int env = 0;
  int rep = 0;
  double cost = 0.0;
  double oracle = 0.0;
  double gap = 0.0;
  bool failed = false;
  int steps = 0;
  double online_seconds = 0.0;
  double offline_seconds = 0.0;
  std::uint64_t digest = 0;
};

// Runs one (policy, environment, replicate) cell. The trace is optionally
// returned; its JSON-lines form carries the summary fields of the result.
RunResult run_cell(const Instance& inst, const PolicySpec& policy, int rep,
                   const TrainedModel* model, const HarnessConfig& cfg, EpisodeTrace* trace = nullptr,
                   std::string* jsonl = nullptr);

// Executes every cell of the matrix. When out_dir is non-empty, writes one
// trace file per cell, timing.csv, report.csv and runs.csv under it.
std::vector<RunResult> run_matrix(const std::vector<ScenarioSet>& sets,
                                  const std::vector<PolicySpec>& policies, const HarnessConfig& cfg,
                                  const std::string& out_dir = {}, bool verbose = false);

struct MetricRow {
  std::string policy;
  std::string setting;
  double lambda = 0.0;
  double range = 0.0;
  int obstacles = 0;
  std::string grid;
  std::string metric;
  double value = 0.0;
  double ci95 = 0.0;
};

std::vector<MetricRow> aggregate(const std::vector<RunResult>& runs);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
};
Summary summarize(std::vector<double> values);

// Paired comparison of two policies over shared (setting, env, rep) cells:
// mean of b - a and its 95% half-width over environment-mean differences.
struct PairedDifference {
  double mean = 0.0;
  double ci95 = 0.0;
  int pairs = 0;
};
PairedDifference paired_difference(const std::vector<RunResult>& runs, const std::string& a,
                                   const std::string& setting_a, const std::string& b,
                                   const std::string& setting_b);

void write_report(const std::vector<MetricRow>& rows, const std::string& path);
void write_runs(const std::vector<RunResult>& runs, const std::string& path);
// Rebuild runs from a directory written by run_matrix.
std::vector<RunResult> load_runs(const std::string& dir);

}  // namespace scos
