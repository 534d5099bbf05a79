#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "scos/dist_rl.hpp"
#include "scos/grf_belief.hpp"
#include "scos/macro_planner.hpp"
#include "scos/sensing.hpp"
#include "scos/simulation.hpp"
#include "scos/value_learning.hpp"

namespace scos {

struct Decision {
  Candidate candidate;
  int index = 0;
  int candidate_count = 0;
  double cost = 0.0;
  double mi = 0.0;
  double bonus = 0.0;
  double gamma = 0.0;
  std::vector<double> scores;
  std::vector<int> discarded;
};

// Incremental change to a base model, stored in traces so it can be replayed.
struct BaseUpdate {
  enum class Kind { kMonteCarlo, kProject, kRefine };
  Kind kind = Kind::kMonteCarlo;
  int state = -1;
  int next = -1;
  double value = 0.0;  // target (MC), shift (project) or observed cost (refine)
  nlohmann::json to_json() const;
  static BaseUpdate from_json(const nlohmann::json& j);
};

class BaseModel {
 public:
  enum class Kind { kPoint, kDistributional };
  BaseModel() = default;
  explicit BaseModel(ValueTable table) : kind_(Kind::kPoint), point_(std::move(table)) {}
  explicit BaseModel(DistributionTable table) : kind_(Kind::kDistributional), dist_(std::move(table)) {}

  Kind kind() const { return kind_; }
  double estimate(int v) const;
  void apply(const BaseUpdate& u);
  const ValueTable& point() const { return point_; }
  const DistributionTable& distribution() const { return dist_; }
  nlohmann::json to_json() const;

 private:
  Kind kind_ = Kind::kPoint;
  ValueTable point_;
  DistributionTable dist_;
};

struct RolloutConfig {
  int samples = 32;
  double gamma_scale = 1.0;
  bool use_bonus = true;
  int step_cap_factor = 6;
  void validate() const;
};

struct StepView {
  const PlanningContext& ctx;
  const BeliefState& belief;
  int vertex;
  int step;
  double past_mi;
};

// Simulated raw cost-to-go from `next` in one sampled environment, where
// `labels` already reflects the decision's disambiguation.
using SuccessorScore = std::function<double(std::vector<Label> labels, int next,
                                            const Statuses& truth, double past_mi, Rng& rng)>;

// Candidates scored by immediate cost plus either the base value (when
// `score` is empty, or samples == 0, or `direct` is set) or the average
// simulated cost over posterior samples shared by all candidates.
Decision rollout_decide(const StepView& view, const RolloutConfig& config,
                        const std::function<double(int)>& base_value, const SuccessorScore& score,
                        bool direct, Rng& rng);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Decision decide(const StepView& view, Rng& rng) = 0;
  // After a decision executed; returns base updates performed, if any.
  virtual std::vector<BaseUpdate> after_step(int /*from*/, int /*to*/, double /*adjusted*/) { return {}; }
  virtual std::vector<BaseUpdate> end_episode() { return {}; }
};

// Rollout over a learned base model, updating a private copy of it online.
class TwoStagePolicy : public Policy {
 public:
  TwoStagePolicy(std::string name, BaseModel base, RolloutConfig config);
  std::string name() const override { return name_; }
  Decision decide(const StepView& view, Rng& rng) override;
  std::vector<BaseUpdate> after_step(int from, int to, double adjusted) override;
  std::vector<BaseUpdate> end_episode() override;
  const BaseModel& base() const { return base_; }

 private:
  std::string name_;
  BaseModel base_;
  RolloutConfig config_;
  DecisionCache cache_;
  std::vector<std::pair<int, double>> realised_;  // (state, adjusted step cost)
};

struct TraceStep {
  int t = 0;
  int vertex = -1;
  Decision decision;
  double segment_length = 0.0;
  int disambiguated = kGoal;
  bool revealed_blocked = false;
  double disambiguation_cost = 0.0;
  std::vector<Observation> observations;
  std::uint64_t belief_digest = 0;
  std::vector<BaseUpdate> updates;
};

struct EpisodeTrace {
  std::string policy;
  std::vector<Observation> initial_observations;
  std::vector<TraceStep> steps;
  std::vector<BaseUpdate> final_updates;
  double path_length = 0.0;
  double disambiguation_cost = 0.0;
  double total_cost = 0.0;
  double adjusted_cost = 0.0;
  bool reached_goal = false;
  bool failed = false;
  std::string failure;
  double online_seconds = 0.0;
  double offline_seconds = 0.0;

  // Identity check: totals equal the sums of step entries.
  bool accounting_holds(double tol = 1e-9) const;
  // Records without wall-clock fields, so equal seeds give equal bytes.
  std::vector<nlohmann::json> records(const nlohmann::json& summary_extra = {}) const;
  std::string jsonl(const nlohmann::json& summary_extra = {}) const;
};

struct EpisodeConfig {
  int step_cap_factor = 6;
};

EpisodeTrace execute_episode(const PlanningContext& ctx, const SensorModel& sensor,
                             const Statuses& truth, BeliefState belief, Policy& policy,
                             const EpisodeConfig& config, Rng& rng);

std::uint64_t fnv1a(const std::string& s);

}  // namespace scos
