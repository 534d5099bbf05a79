#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "scos/grf_belief.hpp"
#include "scos/simulation.hpp"

namespace scos {

enum class Exploration { kGreedy, kEpsilonGreedy, kSoftmax };

std::string to_string(Exploration e);
Exploration exploration_from_string(const std::string& s);

struct OpiConfig {
  double eta = 0.5;
  int max_iterations = 2000;
  Exploration exploration = Exploration::kGreedy;
  double epsilon0 = 0.2;
  double epsilon_decay = 0.95;
  double beta = 1.0;
  double gamma_scale = 1.0;
  bool use_bonus = true;
  int window = 20;      // iterations the max-change must stay below eta
  int min_visits = 5;   // per tracked state before convergence may be declared
  int truncation_factor = 4;
  void validate() const;
};

class ValueTable {
 public:
  struct Entry {
    double value = 0.0;
    int visits = 0;
  };

  ValueTable() = default;
  ValueTable(int goal, std::shared_ptr<const std::vector<double>> fallback)
      : goal_(goal), fallback_(std::move(fallback)) {}

  // Unvisited states read the optimistic cost-to-go; the goal is pinned at 0.
  double value(int v) const;
  int visits(int v) const;
  // Running mean: N += 1, V += (target - V) / N.
  void update(int v, double target);
  const std::map<int, Entry>& entries() const { return entries_; }
  int goal() const { return goal_; }

  nlohmann::json to_json() const;
  static ValueTable from_json(const nlohmann::json& j,
                              std::shared_ptr<const std::vector<double>> fallback);

 private:
  int goal_ = -1;
  std::shared_ptr<const std::vector<double>> fallback_;
  std::map<int, Entry> entries_;
};

struct TrainingLog {
  int iterations = 0;
  bool converged = false;
  int truncated = 0;
  std::vector<double> max_change;
  double seconds = 0.0;
  nlohmann::json to_json() const;
};

struct TrainedValues {
  ValueTable table;
  TrainingLog log;
};

// First-visit update: each state's target is the adjusted cost accumulated
// from its first occurrence to the end of the trajectory.
void mc_update(ValueTable& table, const Trajectory& trajectory);

// Index into `evals` chosen by the exploration rule; ties go to the lowest index.
int improve_policy(const std::vector<CandidateEval>& evals, Exploration exploration,
                   const OpiConfig& config, int step, Rng& rng);

// Optimistic cost-to-go under the belief's labels, used for unvisited states.
std::shared_ptr<const std::vector<double>> optimistic_fallback(const PlanningContext& ctx,
                                                               const std::vector<Label>& labels);

// Starting states: the root plus every obstacle candidate's stop vertex, the
// latter entered with that obstacle already disambiguated.
struct TrainingStart {
  int vertex;
  int obstacle;
};
std::vector<TrainingStart> training_starts(const DecisionSet& root_decisions, int root);

// Convergence bookkeeping shared by the point and distributional learners.
class ConvergenceMonitor {
 public:
  ConvergenceMonitor(std::vector<int> tracked, double eta, int window, int min_visits)
      : tracked_(std::move(tracked)), eta_(eta), window_(window), min_visits_(min_visits) {}
  const std::vector<int>& tracked() const { return tracked_; }
  // Record one iteration given before/after values and visit counts.
  bool record(const std::vector<double>& before, const std::vector<double>& after,
              const std::vector<int>& visits, std::vector<double>& log);

 private:
  std::vector<int> tracked_;
  double eta_;
  int window_;
  int min_visits_;
  int calm_ = 0;
};

TrainedValues opi_train(const PlanningContext& ctx, const BeliefState& belief, int root,
                        const OpiConfig& config, Rng& rng);

}  // namespace scos
