#pragma once

// Independent reference implementations used by tests, the acceptance suite
// and `scos verify`. None of these are on the planner's hot path.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <vector>

#include "scos/grf_belief.hpp"
#include "scos/grid_world.hpp"
#include "scos/macro_planner.hpp"
#include "scos/rng.hpp"

namespace scos::oracle {

// Paper-style precision form with infinite variances replaced by `big`.
Posterior precision_form(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& noise, double big = 1e12);

// Closed-form LLR mixture variance via trigamma/digamma.
double llr_variance_closed_form(double lambda);

// All-pairs shortest path cost by Bellman-Ford relaxation, charging `charges`
// once per obstacle per path is NOT modelled here: this uses the same entry
// rule as the planner so it checks the search, not the cost model.
std::vector<double> bellman_ford_to(const LatticeWorld& world, std::span<const Label> labels,
                                    Charges charges, int target);

// Exhaustive depth-first enumeration of simple paths with branch-and-bound.
// `cost` maps a complete vertex sequence to its cost (inf = infeasible) and
// `step_lower` is a lower bound on the cost still to pay from a vertex.
struct Enumerated {
  double cost = kInf;
  std::vector<int> path;  // lexicographically smallest among optimal paths
};
Enumerated enumerate_paths(const LatticeWorld& world, int from, int to,
                           const std::function<bool(int, int)>& edge_ok,
                           const std::function<double(const std::vector<int>&)>& cost,
                           double tol = 1e-9);

// Explicit distribution over statuses of obstacles (1 = blocked).
struct StatusPmf {
  std::vector<Statuses> outcomes;
  std::vector<double> prob;
  static StatusPmf independent(const std::vector<double>& rho, const std::vector<int>& ambiguous,
                               const Statuses& base);
  static StatusPmf empirical(const BeliefState& belief, int draws, Rng& rng);
};

struct ExpectimaxOptions {
  std::vector<int> forced_blocked;  // treated BLOCKED at every node
  // Keep the root decision set unpruned and apply forced_blocked only below
  // it, as a policy does when discards shape its lookahead but not its choice.
  bool discard_below_root = false;
  // Optional shaping: returns the bonus for taking candidate `c` at `v` given
  // labels and cumulative MI, and the MI realised by the step.
  std::function<std::pair<double, double>(int v, const std::vector<Label>&, const Candidate&, double)>
      bonus;
  // When set, follow this fixed policy (index into the candidate list given
  // the node) instead of minimising.
  std::function<int(int v, const std::vector<Label>&, const std::vector<double>& q)> fixed;
};

// Expected cost of the optimal macro-decision policy over Alg.1 decision
// sets, by full expectimax over status outcomes consistent with the labels.
class Expectimax {
 public:
  Expectimax(const LatticeWorld& world, std::vector<Label> root_labels, StatusPmf pmf,
             ExpectimaxOptions options = {});
  double value(int vertex);
  // Expected shaped cost, raw cost and bonus of the optimal (or fixed) policy.
  struct Value {
    double shaped = 0.0;
    double raw = 0.0;
    double bonus = 0.0;
  };
  Value evaluate(int vertex);
  int best_first_candidate(int vertex);
  // Candidate index chosen at an arbitrary node, solving it if needed.
  int choice(int vertex, const std::vector<Label>& labels, double ledger = 0.0);

 private:
  Value solve(int v, const std::vector<Label>& labels, double ledger, int depth);
  double probability_blocked(const std::vector<Label>& labels, int obstacle) const;

  const LatticeWorld& world_;
  std::vector<Label> root_;
  std::vector<Label> root_unpruned_;
  StatusPmf pmf_;
  ExpectimaxOptions opt_;
  std::map<std::tuple<int, std::vector<Label>, double>, Value> memo_;
  std::map<std::tuple<int, std::vector<Label>, double>, int> choices_;
  int root_choice_ = -1;
};

}  // namespace scos::oracle
