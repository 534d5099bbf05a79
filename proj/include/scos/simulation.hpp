#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "scos/grid_world.hpp"
#include "scos/macro_planner.hpp"
#include "scos/rng.hpp"
#include "scos/sensing.hpp"

namespace scos {

// World-level data shared by every learner and executor on one instance.
struct PlanningContext {
  const LatticeWorld* world = nullptr;
  double sensor_range = 0.0;
  double noise_variance = 1.0;
  std::vector<double> charges;
  std::vector<std::vector<int>> in_range;  // obstacle ids within range, per vertex

  static PlanningContext make(const LatticeWorld& world, double sensor_range,
                              double noise_variance);
  double decision_cost(const Candidate& c) const {
    return c.length + (c.is_goal() ? 0.0 : world->obstacle(c.obstacle).disambiguation_cost);
  }
};

// Memo of decision sets keyed on (vertex, labels). Simulations revisit the
// same few label patterns constantly; this removes most shortest-path work.
class DecisionCache {
 public:
  explicit DecisionCache(std::size_t capacity = 200000) : capacity_(capacity) {}
  const DecisionSet& get(const LatticeWorld& world, const std::vector<Label>& labels, int vertex);
  std::size_t size() const { return map_.size(); }

 private:
  struct Key {
    int vertex;
    std::vector<Label> labels;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    std::size_t operator()(const Key& k) const;
  };
  std::size_t capacity_;
  std::unordered_map<Key, std::shared_ptr<const DecisionSet>, Hash> map_;
};

struct CandidateEval {
  int index = 0;
  int next = -1;
  int obstacle = kGoal;
  double cost = 0.0;   // raw immediate cost: segment length plus disambiguation
  double mi = 0.0;
  double bonus = 0.0;
  double value = 0.0;  // value estimate of the successor
  double adjusted() const { return cost - bonus; }
  double q() const { return cost - bonus + value; }
};

// Ambiguous obstacles (AMBIGUOUS_FREE under `labels`) in range of `vertex`.
std::vector<int> ambiguous_in_range(const PlanningContext& ctx, const std::vector<Label>& labels,
                                    int vertex);

struct EvalOptions {
  double gamma_scale = 1.0;
  bool use_bonus = true;
};

// Fills cost, MI, successor values and the bonus for every candidate. Gamma is
// computed from the spread of C + V over candidates and capped at the exploit
// cost (or the largest finite C + V when no exploit path exists).
std::vector<CandidateEval> evaluate_candidates(const PlanningContext& ctx,
                                               const Eigen::MatrixXd& cov,
                                               const std::vector<Label>& labels,
                                               const DecisionSet& decisions, double past_mi,
                                               const std::function<double(int)>& value,
                                               const EvalOptions& options, double* gamma_out = nullptr);

struct SimStep {
  int state = -1;
  int next = -1;
  int obstacle = kGoal;
  double cost = 0.0;
  double bonus = 0.0;
  double mi = 0.0;
};

struct Trajectory {
  std::vector<SimStep> steps;
  bool truncated = false;
  double raw_cost() const;
};

using Chooser = std::function<int(const std::vector<CandidateEval>&, int step, Rng&)>;

// Runs macro-decisions from `start` until the goal. Statuses of disambiguated
// obstacles come from `truth`; no sensor readings are taken.
Trajectory simulate(const PlanningContext& ctx, DecisionCache& cache, const Eigen::MatrixXd& cov,
                    std::vector<Label> labels, int start, const Statuses& truth,
                    const std::function<double(int)>& value, const Chooser& choose,
                    const EvalOptions& options, int step_cap, Rng& rng, double past_mi = 0.0);

// Reveal an obstacle's sampled status in a label vector.
inline void reveal(std::vector<Label>& labels, int obstacle, const Statuses& truth) {
  labels[obstacle] = truth[obstacle] ? Label::kBlocked : Label::kFree;
}

}  // namespace scos
