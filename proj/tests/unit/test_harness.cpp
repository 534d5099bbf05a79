#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "scos/errors.hpp"
#include "scos/harness.hpp"

using namespace scos;
namespace fs = std::filesystem;

namespace {

RunResult run(std::string policy, int env, int rep, double cost, double oracle = 0.0) {
  RunResult r;
  r.policy = std::move(policy);
  r.setting = "s";
  r.env = env;
  r.rep = rep;
  r.cost = cost;
  r.oracle = oracle;
  r.gap = cost - oracle;
  return r;
}

double metric(const std::vector<MetricRow>& rows, const std::string& policy, const std::string& name,
              double* ci = nullptr) {
  for (const auto& r : rows)
    if (r.policy == policy && r.metric == name) {
      if (ci) *ci = r.ci95;
      return r.value;
    }
  FAIL("missing metric " << name);
  return 0.0;
}

ScenarioSpec small_spec() {
  ScenarioSpec spec;
  spec.name = "small";
  spec.width = 20;
  spec.height = 10;
  spec.obstacles = 3;
  spec.radius = 1.5;
  spec.sensor_range = 5.0;
  spec.environments = 2;
  spec.replicates = 2;
  spec.seed = 4;
  return spec;
}

}  // namespace

TEST_CASE("summaries") {
  Summary s = summarize({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.sd == doctest::Approx(1.2909944487));
  Summary one = summarize({7});
  CHECK(one.sd == 0.0);
  CHECK(one.median == 7.0);
  CHECK(summarize({3, 1, 2}).median == 2.0);
  CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("aggregate metrics and confidence intervals") {
  // Two environments with two replicates each; environment means 1.5 and 3.5.
  std::vector<RunResult> runs{run("p", 0, 0, 1), run("p", 0, 1, 2), run("p", 1, 0, 3), run("p", 1, 1, 4)};
  auto rows = aggregate(runs);
  double ci = 0;
  CHECK(metric(rows, "p", "mean_cost", &ci) == 2.5);
  CHECK(ci == doctest::Approx(1.96 * std::sqrt(2.0) / std::sqrt(2.0)));
  CHECK(metric(rows, "p", "median_cost") == 2.5);
  CHECK(metric(rows, "p", "cross_env_sd") == doctest::Approx(std::sqrt(2.0)));
  CHECK(metric(rows, "p", "within_env_sd") == doctest::Approx(std::sqrt(0.5)));
  CHECK(metric(rows, "p", "runs") == 4);
  CHECK(metric(rows, "p", "failures") == 0);

  runs[3].failed = true;
  rows = aggregate(runs);
  CHECK(metric(rows, "p", "failures") == 1);
  CHECK(metric(rows, "p", "mean_cost") == 2.0);
  CHECK_THROWS_AS(aggregate({}), Error);
}

TEST_CASE("paired differences") {
  std::vector<RunResult> runs{run("a", 0, 0, 5), run("a", 1, 0, 6), run("b", 0, 0, 4), run("b", 1, 0, 7)};
  auto d = paired_difference(runs, "a", "s", "b", "s");
  CHECK(d.pairs == 2);
  CHECK(d.mean == 0.0);
  CHECK(d.ci95 == doctest::Approx(1.96 * std::sqrt(2.0) / std::sqrt(2.0)));
  auto none = paired_difference(runs, "a", "s", "c", "s");
  CHECK(none.pairs == 0);
}

TEST_CASE("oracle costs") {
  LatticeWorld open(9, 6, {});
  CHECK(optimal_oracle(open, {}) == doctest::Approx(5.0));
  LatticeWorld w(9, 7, {test::disk(0, 4, 4, 1.0, 2.0)});
  // Free obstacles cost nothing with perfect information.
  CHECK(optimal_oracle(w, Statuses{0}) == doctest::Approx(6.0));
  double detour = shortest_path(w, std::vector<Label>{Label::kBlocked}, w.start(), w.goal(), false).cost;
  CHECK(optimal_oracle(w, Statuses{1}) == doctest::Approx(detour));
}

TEST_CASE("policy specs") {
  for (const auto& p : all_policies()) {
    auto back = PolicySpec::parse(p.name());
    CHECK(back.id == p.id);
    CHECK(back.belief == p.belief);
  }
  auto m = PolicySpec::parse("ts-greedy:marginal");
  CHECK(m.id == PolicyId::kTsGreedy);
  CHECK(m.belief == CorrelationMode::kMarginal);
  CHECK(m.name() == "ts-greedy:marginal");
  CHECK(m.trained());
  CHECK_FALSE(PolicySpec::parse("penalty-rd").trained());
  CHECK_THROWS(PolicySpec::parse("nope"));
  CHECK_THROWS(PolicySpec::parse("ts-greedy:sideways"));
  CHECK(all_policies().size() == 8);
}

TEST_CASE("harness config round trip") {
  HarnessConfig cfg;
  cfg.opi.eta = 0.25;
  cfg.opi.exploration = Exploration::kSoftmax;
  cfg.delta = 0.5;
  cfg.rollout.samples = 7;
  cfg.seed = 11;
  cfg.workers = 3;
  auto back = HarnessConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.opi.eta == 0.25);
  CHECK(back.rollout.samples == 7);
  CHECK(back.workers == 3);
}

TEST_CASE("run matrix writes traces and reports") {
  auto spec = small_spec();
  std::vector<ScenarioSet> sets{build_replicates(spec)};
  std::vector<PolicySpec> policies{PolicySpec::parse("penalty-rd"), PolicySpec::parse("ts-greedy")};
  HarnessConfig cfg;
  cfg.seed = 4;
  cfg.opi.max_iterations = 60;
  cfg.rollout.samples = 4;
  auto dir = fs::temp_directory_path() / "scos_harness_test";
  fs::remove_all(dir);
  auto runs = run_matrix(sets, policies, cfg, dir.string());
  CHECK(runs.size() == 8);
  int traces = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "traces")) traces += e.path().extension() == ".jsonl";
  CHECK(traces == 8);
  for (const char* f : {"report.csv", "runs.csv", "timing.csv"}) CHECK(fs::exists(dir / f));
  for (const auto& r : runs) {
    CHECK_FALSE(r.failed);
    CHECK(r.gap >= -1e-9);
    CHECK(r.gap == doctest::Approx(r.cost - r.oracle));
  }

  // The report can be rebuilt from the directory alone.
  auto loaded = load_runs(dir.string());
  REQUIRE(loaded.size() == runs.size());
  auto a = aggregate(runs), b = aggregate(loaded);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].metric == b[k].metric);
    CHECK(a[k].value == doctest::Approx(b[k].value).epsilon(1e-9));
    CHECK(a[k].ci95 == doctest::Approx(b[k].ci95).epsilon(1e-9));
  }

  // Same seed, same digests.
  auto again = run_matrix(sets, policies, cfg);
  REQUIRE(again.size() == runs.size());
  for (std::size_t k = 0; k < runs.size(); ++k) CHECK(again[k].digest == runs[k].digest);
  fs::remove_all(dir);
}
