#include <algorithm>
#include <cmath>

#include "checks.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "scos/errors.hpp"
#include "scos/macro_planner.hpp"

using namespace scos;
using test::at;
using test::disk;

TEST_CASE("edge_blocked examples") {
  CHECK(edge_blocked({1, 1}, {2, 1}, disk(0, 1.5, 1.0, 0.4)));
  CHECK_FALSE(edge_blocked({1, 1}, {2, 1}, disk(0, 1.5, 3.0, 0.4)));
  CHECK(edge_blocked({1, 1}, {2, 2}, disk(0, 2.0, 1.0, 0.71)));
  CHECK_FALSE(edge_blocked({1, 1}, {2, 2}, disk(0, 2.0, 1.0, 0.70)));
  // Boundary touch counts.
  CHECK(edge_blocked({1, 1}, {2, 1}, disk(0, 1.5, 1.5, 0.5)));
}

TEST_CASE("lattice layout") {
  LatticeWorld w(7, 5, {});
  CHECK(w.vertex(w.start()) == Vertex{3, 5});
  CHECK(w.vertex(w.goal()) == Vertex{3, 1});
  for (int v = 0; v < w.vertex_count(); ++v)
    for (int d = 0; d < LatticeWorld::kDirections; ++d) {
      int u = w.neighbor(v, d);
      if (u < 0) continue;
      Vertex a = w.vertex(v), b = w.vertex(u);
      CHECK(std::max(std::abs(a.i - b.i), std::abs(a.j - b.j)) == 1);
      CHECK(w.neighbor(u, LatticeWorld::opposite(d)) == v);
      CHECK(LatticeWorld::step_length(d) == doctest::Approx(std::hypot(a.i - b.i, a.j - b.j)));
    }
  // Index order is lexicographic order on (i, j).
  for (int v = 1; v < w.vertex_count(); ++v) CHECK(w.vertex(v - 1) < w.vertex(v));
}

TEST_CASE("shortest_path trivial cases") {
  LatticeWorld w(5, 5, {});
  std::vector<Label> none;
  auto p = shortest_path(w, none, at(w, 3, 5), at(w, 3, 1), false);
  CHECK(p.cost == doctest::Approx(4.0));
  CHECK(p.vertices.size() == 5);
  auto self = shortest_path(w, none, at(w, 2, 2), at(w, 2, 2), false);
  CHECK(self.cost == 0.0);
  CHECK(self.vertices == std::vector<int>{at(w, 2, 2)});
}

TEST_CASE("shortest_path through a gap matches enumeration") {
  // Blocked disks along row 3 leave only column 5 open.
  std::vector<Obstacle> obs;
  for (int i = 1; i <= 4; ++i) obs.push_back(disk(i - 1, i, 3.0, 0.45));
  LatticeWorld w(5, 5, obs, {1, 5}, {1, 1});
  auto labels = test::uniform_labels(4, Label::kBlocked);
  auto p = shortest_path(w, labels, w.start(), w.goal(), false);
  auto ok = [&](int a, int b) {
    return edge_weight(w, labels, {}, a, direction_between(w, a, b)) < kInf;
  };
  auto cost = [&](const std::vector<int>& path) { return path_cost(w, labels, {}, path); };
  auto brute = oracle::enumerate_paths(w, w.start(), w.goal(), ok, cost);
  CHECK(p.cost == doctest::Approx(brute.cost).epsilon(1e-12));
  CHECK(p.vertices == brute.path);
  CHECK(std::count(p.vertices.begin(), p.vertices.end(), at(w, 5, 3)) == 1);
}

TEST_CASE("lexicographic tie-break matches enumeration") {
  LatticeWorld w(5, 5, {});
  std::vector<Label> none;
  auto ok = [](int, int) { return true; };
  auto cost = [&](const std::vector<int>& path) { return path_length(w, path); };
  for (auto [a, b] : {std::pair{at(w, 1, 1), at(w, 5, 3)}, {at(w, 3, 5), at(w, 1, 2)},
                      {at(w, 5, 5), at(w, 2, 1)}}) {
    auto p = shortest_path(w, none, a, b, false);
    auto brute = oracle::enumerate_paths(w, a, b, ok, cost);
    CHECK(p.vertices == brute.path);
  }
}

TEST_CASE("unreachable goal reports infinite cost") {
  LatticeWorld w(5, 5, {disk(0, 3, 1, 2.5)});
  auto p = shortest_path(w, std::vector<Label>{Label::kBlocked}, w.start(), w.goal(), false);
  CHECK_FALSE(p.reachable());
  CHECK(p.vertices.empty());
}

TEST_CASE("disambiguation charges follow the entry rule") {
  // One ambiguous disk straddling the straight column.
  LatticeWorld w(7, 7, {disk(0, 4, 4, 1.2, 2.0)});
  std::vector<Label> labels{Label::kAmbiguousFree};
  auto charges = disambiguation_charges(w);
  auto without = shortest_path(w, labels, w.start(), w.goal(), false);
  auto with = shortest_path(w, labels, w.start(), w.goal(), true);
  CHECK(without.cost == doctest::Approx(6.0));
  CHECK(with.cost >= without.cost);
  CHECK(path_cost(w, labels, charges, with.vertices) == doctest::Approx(with.cost));
  // Brute force over simple paths with the same cost model.
  auto ok = [&](int a, int b) {
    return edge_weight(w, labels, charges, a, direction_between(w, a, b)) < kInf;
  };
  auto cost = [&](const std::vector<int>& path) { return path_cost(w, labels, charges, path); };
  auto brute = oracle::enumerate_paths(w, w.start(), w.goal(), ok, cost);
  CHECK(with.cost == doctest::Approx(brute.cost).epsilon(1e-12));
}

TEST_CASE("dijkstra agrees with bellman-ford on random worlds") {
  Rng rng = make_rng(11, {1});
  for (int k = 0; k < 30; ++k) {
    LatticeWorld w = verify::random_world(rng, 12, 8, 5, 0.6, 1.6);
    std::vector<Label> labels(5);
    for (auto& l : labels) l = static_cast<Label>(rng() % 4);
    auto charges = disambiguation_charges(w);
    auto fast = cost_to_go(w, labels, charges, w.goal());
    auto slow = oracle::bellman_ford_to(w, labels, charges, w.goal());
    for (int v = 0; v < w.vertex_count(); ++v) {
      if (slow[v] == kInf) CHECK(fast[v] == kInf);
      else CHECK(fast[v] == doctest::Approx(slow[v]).epsilon(1e-12));
    }
  }
}

TEST_CASE("relaxing a label never raises the shortest path cost") {
  Rng rng = make_rng(12, {1});
  for (int k = 0; k < 40; ++k) {
    LatticeWorld w = verify::random_world(rng, 12, 8, 4, 0.6, 1.8);
    std::vector<Label> labels(4, Label::kBlocked);
    double prev = shortest_path(w, labels, w.start(), w.goal(), false).cost;
    for (int i = 0; i < 4; ++i) {
      labels[i] = Label::kFree;
      double now = shortest_path(w, labels, w.start(), w.goal(), false).cost;
      CHECK(now <= prev + 1e-12);
      prev = now;
    }
  }
}

TEST_CASE("shortest_path is deterministic") {
  Rng rng = make_rng(13, {1});
  LatticeWorld w = verify::random_world(rng, 16, 10, 6, 0.8, 2.0);
  auto labels = test::uniform_labels(6, Label::kAmbiguousFree);
  auto a = shortest_path(w, labels, w.start(), w.goal(), true);
  auto b = shortest_path(w, labels, w.start(), w.goal(), true);
  CHECK(a.vertices == b.vertices);
  CHECK(a.cost == b.cost);
}

TEST_CASE("pseudo_vertex_bound") {
  SUBCASE("goal inside the disk gives C2 = 0") {
    LatticeWorld w(7, 7, {disk(0, 4, 1, 1.5)});
    std::vector<Label> labels{Label::kAmbiguousFree};
    double bound = pseudo_vertex_bound(w, labels, 0, w.start(), w.goal());
    auto exploit = std::vector<Label>{Label::kFree};
    auto reach = cost_from(w, exploit, {}, w.start());
    double c1 = kInf;
    for (int v : w.interior(0)) c1 = std::min(c1, reach[v]);
    CHECK(bound == doctest::Approx(c1));
  }
  SUBCASE("matches brute force over interior vertices on 7x7") {
    LatticeWorld w(7, 7, {disk(0, 6, 3, 1.1), disk(1, 3, 4, 0.9)});
    std::vector<Label> labels{Label::kAmbiguousFree, Label::kAmbiguousFree};
    auto charges = disambiguation_charges(w);
    std::vector<Label> c1_labels{Label::kFree, Label::kAmbiguousBlocking};
    // Zero-cost edges from every interior vertex to the pseudo-vertex let the
    // two halves pick different interior vertices.
    double best1 = kInf, best2 = kInf, paired = kInf;
    for (int v : w.interior(0)) {
      double c1 = shortest_path(w, c1_labels, w.start(), v, false).cost;
      double c2 = shortest_path(w, labels, v, w.goal(), true).cost;
      best1 = std::min(best1, c1);
      best2 = std::min(best2, c2);
      paired = std::min(paired, c1 + c2);
    }
    double bound = pseudo_vertex_bound(w, labels, 0, w.start(), w.goal());
    CHECK(bound == doctest::Approx(best1 + best2));
    CHECK(bound == doctest::Approx(7.0710678119));
    CHECK(bound <= paired + 1e-9);
  }
  SUBCASE("unreachable interior gives infinity") {
    // The remote disk sits behind a blocked wall.
    std::vector<Obstacle> obs{disk(0, 6, 2, 0.6)};
    for (int j = 1; j <= 7; ++j) obs.push_back(disk(j, 5, j, 0.45));
    LatticeWorld w(7, 7, obs);
    std::vector<Label> labels(obs.size(), Label::kBlocked);
    labels[0] = Label::kAmbiguousFree;
    CHECK(pseudo_vertex_bound(w, labels, 0, w.start(), w.goal()) == kInf);
  }
  SUBCASE("no interior vertex") {
    LatticeWorld w(7, 7, {disk(0, 2.5, 2.5, 0.3)});
    CHECK_THROWS_AS(pseudo_vertex_bound(w, std::vector<Label>{Label::kAmbiguousFree}, 0, w.start(), w.goal()),
                    Error);
  }
}

TEST_CASE("pseudo_vertex_bound lower-bounds paths through the disk interior") {
  // Paths whose first ambiguous contact is x and which pass an interior
  // vertex of x: the bound must not exceed their cost plus the charge of x.
  Rng rng = make_rng(14, {1});
  int checked = 0;
  for (int k = 0; k < 30; ++k) {
    LatticeWorld w = verify::random_world(rng, 10, 7, 3, 0.9, 1.6);
    std::vector<Label> labels(3, Label::kAmbiguousFree);
    auto charges = disambiguation_charges(w);
    for (int x = 0; x < 3; ++x) {
      if (w.interior(x).empty()) continue;
      double bound = pseudo_vertex_bound(w, labels, x, w.start(), w.goal());
      for (int v : w.interior(x)) {
        std::vector<Label> pre(3, Label::kAmbiguousBlocking);
        pre[x] = Label::kFree;
        auto a = shortest_path(w, pre, w.start(), v, false);
        auto b = shortest_path(w, labels, v, w.goal(), true);
        if (!a.reachable() || !b.reachable()) continue;
        CHECK(bound <= a.cost + b.cost + 1e-9);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}
