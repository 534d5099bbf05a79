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

namespace {

// Row 4 is walled off by blocked disks except the centre, which holds an
// ambiguous disk, and column 7, which is open.
std::vector<Obstacle> corridor() {
  std::vector<Obstacle> obs{disk(0, 4, 4, 0.45)};
  for (int i : {1, 2, 3, 5, 6}) obs.push_back(disk(static_cast<int>(obs.size()), i, 4, 0.45));
  return obs;
}

std::vector<Label> corridor_labels(int n) {
  std::vector<Label> l(n, Label::kBlocked);
  l[0] = Label::kAmbiguousFree;
  return l;
}

}  // namespace

TEST_CASE("no ambiguous obstacles gives a single goal candidate") {
  LatticeWorld w(9, 6, {disk(0, 5, 3, 1.2)});
  std::vector<Label> labels{Label::kBlocked};
  auto d = identify_decisions(w, labels, w.start(), true);
  REQUIRE(d.candidates.size() == 1);
  CHECK(d.candidates[0].is_goal());
  auto p = shortest_path(w, labels, w.start(), w.goal(), true);
  CHECK(d.candidates[0].segment == p.vertices);
  CHECK(d.exploit_cost == doctest::Approx(p.cost));
}

TEST_CASE("corridor fixture matches hand enumeration") {
  auto obs = corridor();
  LatticeWorld w(7, 7, obs, {4, 7}, {4, 1});
  auto labels = corridor_labels(static_cast<int>(obs.size()));
  auto d = identify_decisions(w, labels, w.start(), true);
  REQUIRE(d.candidates.size() == 2);

  const Candidate& probe = d.candidates[0];
  CHECK(probe.obstacle == 0);
  CHECK(w.vertex(probe.stop_vertex) == Vertex{4, 5});
  CHECK(probe.length == doctest::Approx(2.0));
  CHECK(probe.bound == doctest::Approx(2.0 + 0.45 + 4.0));

  // Detour avoiding the ambiguous disk, by exhaustive enumeration.
  auto blocked = test::uniform_labels(static_cast<int>(obs.size()), Label::kBlocked);
  auto ok = [&](int a, int b) { return edge_weight(w, blocked, {}, a, direction_between(w, a, b)) < kInf; };
  auto cost = [&](const std::vector<int>& path) { return path_cost(w, blocked, {}, path); };
  auto brute = oracle::enumerate_paths(w, w.start(), w.goal(), ok, cost);
  CHECK(brute.cost == doctest::Approx(6 * std::sqrt(2.0)));

  const Candidate& goal = d.candidates[1];
  CHECK(goal.is_goal());
  CHECK(goal.length == doctest::Approx(brute.cost));
  CHECK(goal.segment == brute.path);
  CHECK(d.exploit_cost == doctest::Approx(brute.cost));
  CHECK(probe.bound <= d.exploit_cost);
}

TEST_CASE("decision set structure on random worlds") {
  Rng rng = make_rng(41, {1});
  for (int k = 0; k < 60; ++k) {
    LatticeWorld w = verify::random_world(rng, 18, 10, 8, 0.7, 2.0);
    std::vector<Label> labels(8);
    int ambiguous = 0;
    for (auto& l : labels) {
      double u = uniform01(rng);
      l = u < 0.6 ? Label::kAmbiguousFree : u < 0.8 ? Label::kBlocked : Label::kFree;
      ambiguous += l == Label::kAmbiguousFree;
    }
    DecisionSet d;
    try {
      d = identify_decisions(w, labels, w.start(), true);
    } catch (const Error&) {
      continue;
    }
    CHECK(d.candidates.size() <= static_cast<std::size_t>(ambiguous + 1));
    std::vector<Label> strict(labels);
    for (auto& l : strict)
      if (l == Label::kAmbiguousFree) l = Label::kAmbiguousBlocking;
    for (const auto& c : d.candidates) {
      CHECK(c.segment.front() == w.start());
      CHECK(c.segment.back() == c.stop_vertex);
      CHECK(path_cost(w, strict, {}, c.segment) == doctest::Approx(c.length));
      CHECK(shortest_path(w, strict, w.start(), c.stop_vertex, false).cost == doctest::Approx(c.length));
      if (!c.is_goal()) {
        CHECK(labels[c.obstacle] == Label::kAmbiguousFree);
        if (d.exploit_cost < kInf) CHECK(c.bound <= d.exploit_cost + 1e-9);
      }
    }
    // Candidate obstacles are distinct.
    std::vector<int> ids;
    for (const auto& c : d.candidates)
      if (!c.is_goal()) ids.push_back(c.obstacle);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  }
}

TEST_CASE("soundness over 200 random worlds") {
  auto r = verify::check_soundness(5, 200);
  INFO(r.detail);
  CHECK(r.status == "PASS");
}

TEST_CASE("pruning") {
  SUBCASE("no exploit path means nothing is discarded") {
    // Ambiguous wall across the full width.
    std::vector<Obstacle> obs;
    for (int i = 1; i <= 7; ++i) obs.push_back(disk(i - 1, i, 4, 0.6));
    obs.push_back(disk(7, 1, 7, 0.6));
    LatticeWorld w(7, 7, obs, {4, 7}, {4, 1});
    auto labels = test::uniform_labels(8, Label::kAmbiguousFree);
    auto d = identify_decisions(w, labels, w.start());
    CHECK(d.exploit_cost == kInf);
    CHECK(prune_search_space(w, labels, w.start(), d).empty());
  }
  SUBCASE("remote obstacle is discarded without changing the optimum") {
    auto obs = corridor();
    const int remote = static_cast<int>(obs.size());
    obs.push_back(disk(remote, 1, 7, 0.6));
    LatticeWorld w(7, 7, obs, {4, 7}, {4, 1});
    auto labels = corridor_labels(static_cast<int>(obs.size()));
    labels[remote] = Label::kAmbiguousFree;
    auto d = identify_decisions(w, labels, w.start());
    auto discarded = prune_search_space(w, labels, w.start(), d);
    REQUIRE(discarded == std::vector<int>{remote});
    CHECK(pseudo_vertex_bound(w, labels, remote, w.start(), w.goal()) >= d.exploit_cost);

    Statuses base(obs.size(), 1);
    for (double rho0 : {0.1, 0.5, 0.9})
      for (double rho1 : {0.1, 0.5, 0.9}) {
        std::vector<double> rho(obs.size(), 1.0);
        rho[0] = rho0;
        rho[remote] = rho1;
        auto pmf = oracle::StatusPmf::independent(rho, {0, remote}, base);
        oracle::Expectimax full(w, labels, pmf);
        oracle::ExpectimaxOptions opt;
        opt.forced_blocked = discarded;
        oracle::Expectimax pruned(w, labels, pmf, opt);
        CHECK(full.value(w.start()) == doctest::Approx(pruned.value(w.start())).epsilon(1e-12));
      }
  }
  SUBCASE("candidates are never discarded") {
    auto obs = corridor();
    LatticeWorld w(7, 7, obs, {4, 7}, {4, 1});
    auto labels = corridor_labels(static_cast<int>(obs.size()));
    auto d = identify_decisions(w, labels, w.start());
    CHECK(prune_search_space(w, labels, w.start(), d).empty());
  }
}

TEST_CASE("a discarded obstacle can become worth probing later") {
  // Found by the randomised pruning check. Obstacle 5 has no obstacle-free
  // approach from the start, so it is discarded; once obstacle 2 turns out
  // free the optimal policy goes on to probe it.
  std::vector<Obstacle> obs{
      disk(0, 4.2945926238341752, 6.2511350011958546, 1.3376358029285773, 1.4128488972888014),
      disk(1, 5.6850910047012455, 4.0562719577068691, 1.2895785910250941, 1.0161286253085418),
      disk(2, 8.6188087689678436, 6.6288184797587117, 0.97783669069963253, 2.1473174424334296),
      disk(3, 10.269937209329223, 8.4535667927430183, 1.289868149517299, 2.1079072385654198),
      disk(4, 7.420721985364283, 6.1498676279974216, 1.5508170315098477, 0.67371247605564299),
      disk(5, 9.0767934869706721, 5.0860630063682448, 1.1420352252710413, 0.54862872921951589)};
  LatticeWorld w(14, 9, obs);
  std::vector<double> rho{0.43897412499597871, 0.46870064180571441, 0.16533494120396103,
                          0.34813541141772264, 0.61765277210080005, 0.12347091493060297};
  auto labels = test::uniform_labels(6, Label::kAmbiguousFree);
  auto d = identify_decisions(w, labels, w.start());
  auto gone = prune_search_space(w, labels, w.start(), d);
  REQUIRE(gone == std::vector<int>{5});

  // After 4 blocked and 2 free, obstacle 5 is reachable for less than the
  // exploit cost from where the agent stands.
  auto later = labels;
  later[4] = Label::kBlocked;
  later[2] = Label::kFree;
  int at = d.candidates[0].stop_vertex;
  REQUIRE(d.candidates[0].obstacle == 4);
  auto next = identify_decisions(w, later, at);
  CHECK(pseudo_vertex_bound(w, later, 5, at, w.goal()) < next.exploit_cost);

  std::vector<int> ids{0, 1, 2, 3, 4, 5};
  auto pmf = oracle::StatusPmf::independent(rho, ids, Statuses(6, 0));
  oracle::Expectimax full(w, labels, pmf);
  oracle::ExpectimaxOptions opt;
  opt.forced_blocked = gone;
  opt.discard_below_root = true;
  oracle::Expectimax pruned(w, labels, pmf, opt);
  CHECK(full.value(w.start()) == doctest::Approx(12.3968).epsilon(1e-5));
  CHECK(pruned.value(w.start()) == doctest::Approx(12.5935).epsilon(1e-5));
}
