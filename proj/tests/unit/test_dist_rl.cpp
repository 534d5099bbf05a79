#include <cmath>

#include "checks.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "scos/dist_rl.hpp"
#include "scos/simulation.hpp"

using namespace scos;

TEST_CASE("uniform initialisation") {
  auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
  CHECK(d.size() == 6);
  CHECK(d.mean() == doctest::Approx(5.0));
  CHECK(d.total() == doctest::Approx(6.0));
  for (double a : d.alpha()) CHECK(a == 1.0);
  for (char o : d.observed()) CHECK(o == 0);
  auto single = ValueDistribution::uniform(3.5, 3.5, 1.0);
  CHECK(single.size() == 1);
  CHECK(single.mean() == 3.5);
  auto p = ValueDistribution::point_mass(4.0);
  CHECK(p.mean() == 4.0);
}

TEST_CASE("bellman projection") {
  SUBCASE("shift onto an atom") {
    auto v = ValueDistribution::uniform(0.0, 10.0, 2.0);
    v.bellman_project(ValueDistribution::point_mass(1.0), 3.0);
    CHECK(v.alpha()[2] == doctest::Approx(2.0));
    CHECK(v.total() == doctest::Approx(7.0));
  }
  SUBCASE("midpoint splits evenly") {
    auto v = ValueDistribution::uniform(0.0, 10.0, 2.0);
    v.bellman_project(ValueDistribution::point_mass(2.0), 3.0);
    CHECK(v.alpha()[2] == doctest::Approx(1.5));
    CHECK(v.alpha()[3] == doctest::Approx(1.5));
  }
  SUBCASE("out of range mass goes to the boundary atoms") {
    auto v = ValueDistribution::uniform(0.0, 10.0, 2.0);
    v.bellman_project(ValueDistribution::point_mass(-5.0), 1.0);
    CHECK(v.alpha().front() == doctest::Approx(2.0));
    v.bellman_project(ValueDistribution::point_mass(50.0), 1.0);
    CHECK(v.alpha().back() == doctest::Approx(2.0));
  }
  SUBCASE("random projections add unit mass and keep the support") {
    Rng rng = make_rng(61, {1});
    for (int k = 0; k < 200; ++k) {
      auto v = ValueDistribution::uniform(10 * uniform01(rng), 20 + 10 * uniform01(rng), 0.5 + 2 * uniform01(rng));
      auto next = ValueDistribution::uniform(5 * uniform01(rng), 15 + 20 * uniform01(rng), 0.5 + 3 * uniform01(rng));
      for (int r = 0; r < 5; ++r) next.refine(40 * uniform01(rng));
      auto support = v.support();
      double before = v.total();
      double shift = 8 * uniform01(rng);
      v.bellman_project(next, shift);
      CHECK(v.total() == doctest::Approx(before + 1.0).epsilon(1e-12));
      CHECK(v.support() == support);
      // Interior mass keeps the shifted mean exactly.
      double lo = v.support().front(), hi = v.support().back();
      if (next.support().front() + shift >= lo && next.support().back() + shift <= hi) {
        double added = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) added += v.support()[j] * v.alpha()[j];
        double old_mean_mass = 0.0;
        for (std::size_t j = 0; j < support.size(); ++j) old_mean_mass += support[j];
        CHECK(added - old_mean_mass == doctest::Approx(next.mean() + shift).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("support refinement cases") {
  SUBCASE("existing atom increments") {
    auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
    CHECK(d.refine(4.0) == ValueDistribution::Refinement::kIncrement);
    CHECK(d.size() == 6);
    CHECK(d.alpha()[2] == 2.0);
    CHECK(d.observed()[2] == 1);
  }
  SUBCASE("value between unobserved atoms merges") {
    auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
    CHECK(d.refine(5.0) == ValueDistribution::Refinement::kMerge);
    CHECK(d.size() == 5);
    CHECK(d.support()[2] == 5.0);
    CHECK(d.alpha()[2] == 3.0);
    CHECK(d.total() == doctest::Approx(7.0));
  }
  SUBCASE("value next to an observed atom inserts") {
    auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
    d.refine(4.0);
    CHECK(d.refine(5.0) == ValueDistribution::Refinement::kInsert);
    CHECK(d.size() == 7);
    CHECK(d.support()[3] == 5.0);
    CHECK(d.alpha()[3] == 1.0);
  }
  SUBCASE("isolated value beyond the support inserts") {
    auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
    CHECK(d.refine(25.0) == ValueDistribution::Refinement::kInsert);
    CHECK(d.size() == 7);
    CHECK(d.support().back() == 25.0);
    CHECK(d.alpha().back() == 1.0);
  }
}

TEST_CASE("insert and increment mean shift is exact") {
  auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
  d.refine(4.0);
  double mu = d.mean(), a = d.total();
  d.refine(5.0);
  CHECK(std::abs(d.mean() - mu) == doctest::Approx(std::abs(5.0 - mu) / (a + 1)));
  CHECK(refinement_bound(5.0, mu, a, 0.0, 2.0) == doctest::Approx(std::abs(5.0 - mu) / (a + 1)));
}

TEST_CASE("mean shift bound over random refinements") {
  auto r = verify::check_lemma1(8, 1000);
  INFO(r.detail);
  CHECK(r.status == "PASS");
}

TEST_CASE("thompson draws are symmetric") {
  auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
  Rng rng = make_rng(62, {1});
  const int n = 20000;
  int first = 0;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    double a = d.sample_mean(rng), b = d.sample_mean(rng);
    first += a < b;
    sum += a;
  }
  CHECK(std::abs(first - n / 2.0) <= 3 * std::sqrt(n * 0.25));
  // Dir(1,...,1) mean of the sampled mean is the alpha-weighted mean.
  CHECK(sum / n == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("json round trip") {
  auto d = ValueDistribution::uniform(0.0, 10.0, 2.0);
  d.refine(5.0);
  d.refine(30.0);
  auto back = ValueDistribution::from_json(d.to_json());
  CHECK(back.support() == d.support());
  CHECK(back.alpha() == d.alpha());
  CHECK(back.observed() == d.observed());
  CHECK(back.delta() == d.delta());
}

TEST_CASE("drl on a deterministic world concentrates") {
  LatticeWorld w(9, 6, {test::disk(0, 5, 3, 1.2)});
  auto ctx = PlanningContext::make(w, 3.0, 1.0);
  BeliefState b(kernel_matrix(Kernel{}, w.obstacles()));
  b.apply_disambiguation(0, true);
  DrlConfig cfg;
  cfg.opi.max_iterations = 200;
  cfg.opi.eta = 1e-12;
  Rng rng = make_rng(63, {1});
  auto td = drl_train(ctx, b, w.start(), cfg, rng);
  const ValueDistribution* root = td.table.find(w.start());
  REQUIRE(root != nullptr);
  double top = 0.0;
  for (double a : root->alpha()) top = std::max(top, a);
  CHECK(top / root->total() >= 0.95);
  auto labels = b.labels();
  CHECK(td.table.mean(w.start()) == doctest::Approx(shortest_path(w, labels, w.start(), w.goal(), true).cost).epsilon(0.01));
}

TEST_CASE("drl matches the two-outcome mixture") {
  auto obs = test::two_gap_wall();
  LatticeWorld w(11, 7, obs, {5, 7}, {5, 1});
  auto ctx = PlanningContext::make(w, 2.0, 1.0);
  BeliefState belief = test::independent_prior(obs, 1);
  DrlConfig cfg;
  cfg.opi.use_bonus = false;
  cfg.opi.max_iterations = 500;
  cfg.opi.eta = 1e-12;

  Statuses base(obs.size(), 1);
  std::vector<double> rho(obs.size(), 1.0);
  rho[0] = 0.5;
  oracle::Expectimax exact(w, test::gap_labels(obs.size(), 1), oracle::StatusPmf::independent(rho, {0}, base));
  const double expect = exact.value(w.start());

  const int runs = 5;
  double mean = 0.0;
  for (int k = 0; k < runs; ++k) {
    Rng rng = make_rng(64, {static_cast<std::uint64_t>(k)});
    auto td = drl_train(ctx, belief, w.start(), cfg, rng);
    mean += td.table.mean(w.start()) / runs;
  }
  INFO("expectimax " << expect << ", learned " << mean);
  CHECK(std::abs(mean - expect) <= 0.05 * expect);
}
