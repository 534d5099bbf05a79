#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "scos/errors.hpp"
#include "scos/scenario.hpp"

using namespace scos;
using test::disk;

TEST_CASE("no obstacles") {
  ScenarioSpec spec;
  spec.obstacles = 0;
  Rng rng = make_rng(1, {1});
  CHECK(place_obstacles(spec, rng).empty());
  auto set = build_replicates(spec);
  REQUIRE(set.environments.size() == 1);
  CHECK(set.environments[0].obstacles.empty());
  CHECK(feasible(make_world(spec, {}), {}));
}

TEST_CASE("full-size layouts stay in the subregion and leave a route") {
  ScenarioSpec spec;  // 50x25, N=20, r=3.5
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    Environment env = build_environment(spec, 0);
    REQUIRE(env.obstacles.size() == 20);
    for (const auto& o : env.obstacles) {
      CHECK(o.center.x >= 1 + spec.margin + spec.radius);
      CHECK(o.center.x <= spec.width - spec.margin - spec.radius);
      CHECK(o.center.y >= 1 + spec.margin + spec.radius);
      CHECK(o.center.y <= spec.height - spec.margin - spec.radius);
      CHECK(o.radius == spec.radius);
      CHECK(o.disambiguation_cost == spec.cost());
    }
    LatticeWorld w = make_world(spec, env.obstacles);
    CHECK(feasible(w, Statuses(20, 1)));
    for (const auto& z : env.replicates) CHECK(feasible(w, z));
  }
}

TEST_CASE("generation is deterministic") {
  ScenarioSpec spec;
  spec.seed = 99;
  spec.environments = 3;
  spec.replicates = 4;
  auto a = build_replicates(spec), b = build_replicates(spec);
  CHECK(a.to_json() == b.to_json());
  // Any environment can be rebuilt on its own.
  auto e2 = build_environment(spec, 2);
  CHECK(e2.latent == a.environments[2].latent);
  CHECK(e2.replicates == a.environments[2].replicates);
  spec.seed = 100;
  CHECK(build_replicates(spec).to_json() != a.to_json());
}

TEST_CASE("replicates share layout and latent field") {
  ScenarioSpec spec;
  spec.seed = 5;
  spec.replicates = 6;
  auto env = build_environment(spec, 0);
  CHECK(env.replicates.size() == 6);
  for (std::size_t i = 0; i < env.latent.size(); ++i)
    CHECK(env.probability[i] == doctest::Approx(1.0 / (1.0 + std::exp(-env.latent[i]))));
}

TEST_CASE("single environment and replicate matches the ground-truth sampler streams") {
  ScenarioSpec spec;
  spec.seed = 17;
  auto set = build_replicates(spec);
  REQUIRE(set.environments.size() == 1);
  const auto& env = set.environments[0];
  REQUIRE(env.replicates.size() == 1);
  Rng latent = make_rng(spec.seed, {kStreamLatent, 0});
  auto y = sample_latent(spec, env.obstacles, latent);
  CHECK(y == env.latent);
  std::vector<double> p;
  for (double v : y) p.push_back(logistic(v));
  Rng status = make_rng(spec.seed, {kStreamStatus, 0, 0});
  CHECK(sample_statuses(spec, env.obstacles, p, status) == env.replicates[0]);
}

TEST_CASE("degenerate trend gives even odds") {
  ScenarioSpec spec;
  spec.trend.goal = 0.0;
  spec.trend.isolation = 0.0;
  spec.env_sigma_f = 0.0;
  auto env = build_environment(spec, 0);
  for (double y : env.latent) CHECK(y == 0.0);
  for (double p : env.probability) CHECK(p == 0.5);
}

TEST_CASE("trend components") {
  ScenarioSpec spec;
  spec.width = 21;
  spec.height = 15;
  spec.radius = 1.0;
  // Mirror images about the goal column x = 10 with mirrored neighbours.
  std::vector<Obstacle> obs{disk(0, 6, 8, 1), disk(1, 14, 8, 1), disk(2, 10, 4, 1), disk(3, 10, 13, 1)};
  auto tg = goal_trend(spec, obs);
  auto ti = isolation_trend(spec, obs);
  CHECK(tg[0] == doctest::Approx(tg[1]));
  CHECK(ti[0] == doctest::Approx(ti[1]));
  // Closer to the goal means a larger trend, scaled to a unit range around zero.
  CHECK(tg[2] == doctest::Approx(0.5));
  CHECK(tg[3] == doctest::Approx(-0.5));
  CHECK(tg[0] < tg[2]);
  CHECK(tg[0] > tg[3]);
  // Isolation: a crowded cluster against a loner.
  std::vector<Obstacle> cl{disk(0, 5, 5, 1), disk(1, 6, 5, 1), disk(2, 5, 6, 1), disk(3, 18, 12, 1)};
  auto tc = isolation_trend(spec, cl);
  CHECK(tc[3] == doctest::Approx(0.5));
  CHECK(tc[0] == doctest::Approx(-0.5));
}

TEST_CASE("latent noise follows the environment kernel") {
  ScenarioSpec spec;
  spec.trend.goal = 0.0;
  spec.trend.isolation = 0.0;
  spec.env_length_scale = 3.0;
  const double l = 3.0;
  std::vector<Obstacle> obs{disk(0, 10, 10, 1), disk(1, 10 + l, 10, 1), disk(2, 10, 10 + 3 * l, 1)};
  Rng rng = make_rng(91, {1});
  const int n = 10000;
  double s00 = 0, s11 = 0, s22 = 0, s01 = 0, s02 = 0;
  for (int k = 0; k < n; ++k) {
    auto y = sample_latent(spec, obs, rng);
    s00 += y[0] * y[0];
    s11 += y[1] * y[1];
    s22 += y[2] * y[2];
    s01 += y[0] * y[1];
    s02 += y[0] * y[2];
  }
  double near = s01 / std::sqrt(s00 * s11), far = s02 / std::sqrt(s00 * s22);
  CHECK(s00 / n == doctest::Approx(2.25).epsilon(0.05));
  CHECK(near == doctest::Approx(std::exp(-0.5)).epsilon(0.05));
  // At 3l the true correlation is 0.011, below the sampling error of 10^4
  // draws, so the ratio is checked through its two terms instead.
  CHECK(std::abs(far - std::exp(-4.5)) < 3.0 / std::sqrt(double(n)));
  CHECK(near > far);
}

TEST_CASE("replicate statuses converge to the latent probabilities") {
  ScenarioSpec spec;
  spec.obstacles = 6;
  spec.width = 40;
  spec.height = 20;
  spec.radius = 1.5;
  spec.seed = 12;
  spec.replicates = 2000;
  auto env = build_environment(spec, 0);
  for (std::size_t i = 0; i < env.obstacles.size(); ++i) {
    double hits = 0;
    for (const auto& z : env.replicates) hits += z[i];
    double p = env.probability[i];
    // Feasibility rejection only removes draws in which every route is blocked,
    // which never happens with six small disks on a 40-wide grid.
    CHECK(std::abs(hits / 2000 - p) <= 3 * std::sqrt(p * (1 - p) / 2000) + 1e-12);
  }
}

TEST_CASE("scenario files round trip") {
  ScenarioSpec spec;
  spec.seed = 3;
  spec.environments = 2;
  spec.replicates = 2;
  spec.lambda = 0.35;
  auto set = build_replicates(spec);
  auto path = std::filesystem::temp_directory_path() / "scos_scenario_roundtrip.json";
  set.save(path.string());
  auto back = ScenarioSet::load(path.string());
  std::filesystem::remove(path);
  CHECK(back.to_json() == set.to_json());
  CHECK(back.spec.setting_id() == spec.setting_id());
}

TEST_CASE("invalid specs") {
  ScenarioSpec spec;
  spec.width = 5;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = ScenarioSpec{};
  spec.lambda = 4.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = ScenarioSpec{};
  spec.environments = 0;
  CHECK_THROWS_AS(spec.validate(), Error);
}
