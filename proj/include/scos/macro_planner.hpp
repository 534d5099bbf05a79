#pragma once

#include <span>
#include <vector>

#include "scos/grf_belief.hpp"
#include "scos/grid_world.hpp"

namespace scos {

inline constexpr int kGoal = -1;

struct Candidate {
  int stop_vertex = -1;
  int obstacle = kGoal;       // obstacle disambiguated on arrival, or kGoal
  std::vector<int> segment;   // obstacle-free path from the current vertex
  double length = 0.0;
  double bound = kInf;        // optimistic completion cost, when requested
  bool is_goal() const { return obstacle == kGoal; }
};

struct DecisionSet {
  std::vector<Candidate> candidates;
  double exploit_cost = kInf;  // best path avoiding every ambiguous obstacle
  std::vector<int> discarded;
  bool has_goal() const {
    return !candidates.empty() && candidates.back().is_goal();
  }
};

// Peel the first ambiguous obstacle off successive optimistic shortest paths.
// Labels must use AMBIGUOUS_FREE for every ambiguous obstacle still in play.
DecisionSet identify_decisions(const LatticeWorld& world, std::span<const Label> labels, int from,
                               bool with_bounds = false);
DecisionSet identify_decisions(const LatticeWorld& world, const BeliefState& belief, int from,
                               bool with_bounds = false);

// C1 + C2 through a pseudo-vertex wired to the disk's interior vertices.
double pseudo_vertex_bound(const LatticeWorld& world, std::span<const Label> labels, int obstacle,
                           int from, int goal);

// Ambiguous non-candidate obstacles whose bound is at least the exploit cost.
std::vector<int> prune_search_space(const LatticeWorld& world, std::span<const Label> labels,
                                    int from, const DecisionSet& decisions);

}  // namespace scos
