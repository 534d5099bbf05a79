#pragma once

#include <span>
#include <string>
#include <vector>

#include "scos/rollout.hpp"

namespace scos {

enum class PenaltyVariant { kRD, kDT };

inline constexpr double kRhoCeiling = 1.0 - 1e-12;

// Per-obstacle penalty for one ambiguous obstacle with blockage probability rho.
// RD: c / (1 - rho). DT: c + (d / (1 - rho))^(-ln(1 - rho)).
double obstacle_penalty(PenaltyVariant variant, double cost, double rho, double dist_to_goal);

// Path length plus the penalty of every ambiguous obstacle the path touches.
double penalty_path_cost(PenaltyVariant variant, const LatticeWorld& world, const BeliefState& belief,
                         std::span<const int> path);

std::vector<double> penalty_charges(PenaltyVariant variant, const LatticeWorld& world,
                                    const BeliefState& belief);

// Minimise the penalised cost, then walk to the first ambiguous contact.
Decision penalty_policy_step(PenaltyVariant variant, const LatticeWorld& world,
                             const BeliefState& belief, int vertex);

class PenaltyPolicy : public Policy {
 public:
  explicit PenaltyPolicy(PenaltyVariant variant) : variant_(variant) {}
  std::string name() const override { return variant_ == PenaltyVariant::kRD ? "penalty-rd" : "penalty-dt"; }
  Decision decide(const StepView& view, Rng& rng) override;

 private:
  PenaltyVariant variant_;
};

// Rollout whose simulated successor cost is the shortest path in the sampled
// environment with every status known.
class HindsightRolloutPolicy : public Policy {
 public:
  explicit HindsightRolloutPolicy(RolloutConfig config) : config_(config) {
    config_.validate();
    config_.use_bonus = false;
  }
  std::string name() const override { return "ro-hindsight"; }
  Decision decide(const StepView& view, Rng& rng) override;

 private:
  RolloutConfig config_;
};

// Rollout whose simulated base policy treats every ambiguous obstacle as
// traversable, disambiguating on contact and replanning.
class OptimisticRolloutPolicy : public Policy {
 public:
  explicit OptimisticRolloutPolicy(RolloutConfig config) : config_(config) {
    config_.validate();
    config_.use_bonus = false;
  }
  std::string name() const override { return "ro-optimism"; }
  Decision decide(const StepView& view, Rng& rng) override;

 private:
  RolloutConfig config_;
  DecisionCache cache_;
};

}  // namespace scos
