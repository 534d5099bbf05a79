#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scos/grid_world.hpp"
#include "scos/harness.hpp"
#include "scos/rng.hpp"

namespace scos::verify {

struct CheckResult {
  std::string name;
  std::string status;  // PASS, FAIL or INCONCLUSIVE
  std::string detail;
  double seconds = 0.0;
  bool ok() const { return status != "FAIL"; }
};

// Small random worlds for property tests: `n` disks with radii in
// [r_lo, r_hi], centres kept off the start and goal vertices.
LatticeWorld random_world(Rng& rng, int width, int height, int n, double r_lo, double r_hi);

CheckResult check_posterior(std::uint64_t seed, int instances = 100);
CheckResult check_submodularity(std::uint64_t seed, int kernels = 50);
CheckResult check_soundness(std::uint64_t seed, int worlds = 200);
CheckResult check_pruning_safety(std::uint64_t seed, int instances = 50);
CheckResult check_lemma1(std::uint64_t seed, int events = 10000);
CheckResult check_theorem2(std::uint64_t seed, int problems = 20);
CheckResult check_convergence(std::uint64_t seed, int instances = 10);
CheckResult check_accounting(std::uint64_t seed);

std::vector<CheckResult> run_property_checks(std::uint64_t seed);

struct ScaledOptions {
  int environments = 15;
  int replicates = 5;
  std::vector<double> lambdas{0.35, 2.5};
  double range = 12.5;
  std::vector<double> ranges{10.0, 15.0};
  int workers = 1;
  std::uint64_t seed = 2024;
  std::string out_dir;
  bool verbose = false;
  HarnessConfig harness;
};

std::vector<CheckResult> check_scaled(const ScaledOptions& options);

std::string format(const CheckResult& r);

}  // namespace scos::verify
