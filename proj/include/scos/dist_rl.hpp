#pragma once

#include <map>
#include <memory>
#include <vector>

#include <json.hpp>

#include "scos/grf_belief.hpp"
#include "scos/simulation.hpp"
#include "scos/value_learning.hpp"

namespace scos {

class ValueDistribution {
 public:
  ValueDistribution() = default;
  // Uniform Dirichlet over an equally spaced grid from lower to upper.
  static ValueDistribution uniform(double lower, double upper, double delta);
  static ValueDistribution point_mass(double x, double delta = 1.0);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& alpha() const { return alpha_; }
  const std::vector<char>& observed() const { return observed_; }
  double delta() const { return delta_; }
  std::size_t size() const { return support_.size(); }
  double total() const;
  double mean() const;
  // Mean under one draw p ~ Dir(alpha).
  double sample_mean(Rng& rng) const;

  // Shift every atom of `next` by `shift` and split its probability between
  // the bracketing atoms of this support with linear weights.
  void bellman_project(const ValueDistribution& next, double shift);

  enum class Refinement { kIncrement, kMerge, kInsert };
  Refinement refine(double observed);

  nlohmann::json to_json() const;
  static ValueDistribution from_json(const nlohmann::json& j);

 private:
  std::vector<double> support_;
  std::vector<double> alpha_;
  std::vector<char> observed_;
  double delta_ = 1.0;
};

// Lemma-style bound on the mean shift caused by one refinement with value c.
// For merges the bound needs the merged pair's prior mass, passed in.
double refinement_bound(double c, double mean_before, double total_before, double merged_alpha,
                        double delta);

struct DrlConfig {
  OpiConfig opi;          // eta, caps, bonus settings; exploration is ignored
  double delta = 1.0;
  bool thompson = true;   // false scores successors by the posterior mean
  void validate() const;
};

class DistributionTable {
 public:
  DistributionTable() = default;
  DistributionTable(int goal, double delta, std::shared_ptr<const std::vector<double>> lower,
                    std::shared_ptr<const std::vector<double>> upper)
      : goal_(goal), delta_(delta), lower_(std::move(lower)), upper_(std::move(upper)) {}

  // Creates the state's distribution from the stored bounds on first touch.
  ValueDistribution& at(int v);
  const ValueDistribution* find(int v) const;
  double mean(int v) const;
  double sample_mean(int v, Rng& rng) const;
  const std::map<int, ValueDistribution>& entries() const { return entries_; }
  int goal() const { return goal_; }
  ValueDistribution initial(int v) const;

  nlohmann::json to_json() const;
  static DistributionTable from_json(const nlohmann::json& j,
                                     std::shared_ptr<const std::vector<double>> lower,
                                     std::shared_ptr<const std::vector<double>> upper);

 private:
  int goal_ = -1;
  double delta_ = 1.0;
  std::shared_ptr<const std::vector<double>> lower_;
  std::shared_ptr<const std::vector<double>> upper_;
  std::map<int, ValueDistribution> entries_;
};

struct TrainedDistributions {
  DistributionTable table;
  TrainingLog log;
};

// Support bounds per vertex: optimistic cost-to-go below, exploit cost-to-go
// plus the in-range disambiguation costs above.
std::pair<std::shared_ptr<const std::vector<double>>, std::shared_ptr<const std::vector<double>>>
support_bounds(const PlanningContext& ctx, const std::vector<Label>& labels);

// One Bellman projection per step, then first-visit refinement of every
// visited state with its realised adjusted cost-to-go.
void drl_update(DistributionTable& table, const Trajectory& trajectory);

TrainedDistributions drl_train(const PlanningContext& ctx, const BeliefState& belief, int root,
                               const DrlConfig& config, Rng& rng);

}  // namespace scos
