#pragma once

#include "helpers.hpp"
#include "scos/grf_belief.hpp"

namespace test {

// Row 4 is walled off by blocked disks except two ambiguous gaps at columns 3
// and 7. Column 11 stays open as a long detour. Obstacle 0 and 1 are the gaps.
inline std::vector<scos::Obstacle> two_gap_wall(double gap_cost = 0.45) {
  std::vector<scos::Obstacle> obs{disk(0, 3, 4, 0.45, gap_cost), disk(1, 7, 4, 0.45, gap_cost)};
  for (int i = 1; i <= 10; ++i)
    if (i != 3 && i != 7) obs.push_back(disk(static_cast<int>(obs.size()), i, 4, 0.45));
  return obs;
}

inline std::vector<scos::Label> gap_labels(std::size_t n, int gaps) {
  std::vector<scos::Label> l(n, scos::Label::kBlocked);
  for (int k = 0; k < gaps; ++k) l[k] = scos::Label::kAmbiguousFree;
  return l;
}

// Near-diagonal prior: every obstacle is blocked with probability 1/2 and the
// gaps are effectively independent.
inline scos::BeliefState independent_prior(const std::vector<scos::Obstacle>& obs, int gaps) {
  scos::BeliefState b(scos::kernel_matrix(scos::Kernel{1.5, 0.05}, obs));
  for (int id = gaps; id < static_cast<int>(obs.size()); ++id) b.apply_disambiguation(id, true);
  return b;
}

}  // namespace test
