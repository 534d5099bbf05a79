#pragma once

#include <doctest.h>

#include <cmath>
#include <vector>

#include "scos/grid_world.hpp"
#include "scos/rng.hpp"

namespace test {

inline scos::Obstacle disk(int id, double x, double y, double r, double cost = -1.0) {
  return {id, {x, y}, r, cost < 0 ? r : cost};
}

inline std::vector<scos::Label> uniform_labels(int n, scos::Label l) {
  return std::vector<scos::Label>(n, l);
}

inline int at(const scos::LatticeWorld& w, int i, int j) { return w.index({i, j}); }

}  // namespace test
