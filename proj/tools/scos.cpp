#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "checks.hpp"
#include "scos/errors.hpp"
#include "scos/harness.hpp"
#include "scos/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Config errors exit 2, run failures 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Values given on the command line win over the config file.
struct Overrides {
  std::string config;
  std::optional<double> eta, delta, gamma_scale;
  std::optional<int> rollout_samples, max_iterations, workers;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--eta", eta, "convergence threshold");
    app->add_option("--delta", delta, "distributional support spacing");
    app->add_option("--gamma-scale", gamma_scale, "information bonus scale");
    app->add_option("--rollout-samples", rollout_samples, "posterior samples per rollout step");
    app->add_option("--max-iterations", max_iterations, "training iteration cap");
    app->add_option("--workers", workers, "worker threads (env SCOS_WORKERS)");
    app->add_option("--seed", seed, "master seed");
  }

  scos::HarnessConfig harness() const {
    json j = config.empty() ? json::object() : read_json(config);
    if (j.contains("harness")) j = j["harness"];
    if (const char* w = std::getenv("SCOS_WORKERS")) j["workers"] = std::atoi(w);
    if (eta) j["eta"] = *eta;
    if (delta) j["delta"] = *delta;
    if (gamma_scale) j["gamma_scale"] = *gamma_scale;
    if (rollout_samples) j["rollout_samples"] = *rollout_samples;
    if (max_iterations) j["max_iterations"] = *max_iterations;
    if (workers) j["workers"] = *workers;
    if (seed) j["seed"] = *seed;
    try {
      return scos::HarnessConfig::from_json(j);
    } catch (const json::exception& e) {
      throw ConfigError(e.what());
    }
  }
};

std::vector<scos::PolicySpec> parse_policies(const std::vector<std::string>& names) {
  std::vector<scos::PolicySpec> out;
  if (names.empty()) return scos::all_policies();
  for (const auto& n : names) out.push_back(scos::PolicySpec::parse(n));
  return out;
}

void write_json(const json& j, const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// Long-format rows keyed by the figure axes (lambda, R, N) for plotting.
void write_plot_csv(const std::vector<scos::MetricRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out.precision(10);
  out << "metric,policy,lambda,R,N,grid,value,lo,hi\n";
  for (const auto& r : rows)
    out << r.metric << ',' << r.policy << ',' << r.lambda << ',' << r.range << ',' << r.obstacles
        << ',' << r.grid << ',' << r.value << ',' << r.value - r.ci95 << ',' << r.value + r.ci95
        << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated-obstacle navigation experiments"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "build a scenario file");
  std::string grid = "50x25", gen_config, gen_out = "scenario.json", name = "scenario";
  std::optional<int> n_obs, envs, reps;
  std::optional<double> lambda, range, radius, cost, env_sf, env_l, bel_sf, bel_l, w_goal, w_iso, iso_r;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--config", gen_config, "JSON scenario spec");
  gen->add_option("--grid", grid, "WIDTHxHEIGHT");
  gen->add_option("--n", n_obs, "obstacle count");
  gen->add_option("--lambda", lambda, "sensor noise parameter in (0, 4)");
  gen->add_option("--range", range, "sensor range");
  gen->add_option("--radius", radius, "obstacle radius");
  gen->add_option("--cost", cost, "disambiguation cost");
  gen->add_option("--envs", envs, "environments");
  gen->add_option("--reps", reps, "replicates per environment");
  gen->add_option("--env-sigma", env_sf, "ground-truth kernel sigma_f");
  gen->add_option("--env-length", env_l, "ground-truth kernel length scale");
  gen->add_option("--belief-sigma", bel_sf, "belief kernel sigma_f");
  gen->add_option("--belief-length", bel_l, "belief kernel length scale");
  gen->add_option("--trend-goal", w_goal, "goal trend weight");
  gen->add_option("--trend-isolation", w_iso, "isolation trend weight");
  gen->add_option("--isolation-radius", iso_r, "isolation neighbourhood radius");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--name", name, "scenario name");
  gen->add_option("-o,--out", gen_out, "output file");

  // train
  auto* train = app.add_subcommand("train", "train base models for one scenario");
  std::string train_scenario, train_out = "models";
  std::vector<std::string> train_policies;
  Overrides train_ov;
  train->add_option("--scenario", train_scenario, "scenario file")->required();
  train->add_option("--policy", train_policies, "policy ids (default: all trained ones)");
  train->add_option("-o,--out", train_out, "output directory");
  train_ov.add(train);

  // run
  auto* run = app.add_subcommand("run", "execute the policy x scenario matrix");
  std::vector<std::string> run_scenarios, run_policies;
  std::string run_out = "results";
  bool run_verbose = false;
  Overrides run_ov;
  run->add_option("--scenario", run_scenarios, "scenario files")->required();
  run->add_option("--policy", run_policies, "policy ids (default: all)");
  run->add_option("-o,--out", run_out, "output directory");
  run->add_flag("-v,--verbose", run_verbose, "progress on stderr");
  run_ov.add(run);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "recompute report.csv from traces");
  std::string eval_dir = "results";
  eval->add_option("--dir", eval_dir, "directory written by run");

  // report
  auto* rep = app.add_subcommand("report", "write plot-ready tables");
  std::string rep_dir = "results", rep_out;
  rep->add_option("--dir", rep_dir, "directory written by run");
  rep->add_option("-o,--out", rep_out, "output CSV (default DIR/plot.csv)");

  // verify
  auto* ver = app.add_subcommand("verify", "run the property and oracle suites");
  std::uint64_t ver_seed = 2024;
  bool ver_slow = false;
  ver->add_option("--seed", ver_seed, "seed for random instances");
  ver->add_flag("--slow", ver_slow, "also run the convergence and accounting checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      json j = gen_config.empty() ? json::object() : read_json(gen_config);
      int w = 0, h = 0;
      char x = 0;
      std::istringstream gs(grid);
      if (!(gs >> w >> x >> h) || x != 'x') throw ConfigError("--grid expects WIDTHxHEIGHT");
      if (!gen->get_option("--grid")->empty() || !j.contains("width")) {
        j["width"] = w;
        j["height"] = h;
      }
      auto set = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
      };
      set("obstacles", n_obs);
      set("lambda", lambda);
      set("sensor_range", range);
      set("radius", radius);
      set("disambiguation_cost", cost);
      set("environments", envs);
      set("replicates", reps);
      set("env_sigma_f", env_sf);
      set("env_length_scale", env_l);
      set("belief_sigma_f", bel_sf);
      set("belief_length_scale", bel_l);
      set("trend_goal", w_goal);
      set("trend_isolation", w_iso);
      set("isolation_radius", iso_r);
      set("seed", gen_seed);
      if (!gen->get_option("--name")->empty() || !j.contains("name")) j["name"] = name;
      scos::ScenarioSpec spec;
      try {
        spec = scos::ScenarioSpec::from_json(j);
      } catch (const json::exception& e) {
        throw ConfigError(e.what());
      }
      auto scenario = scos::build_replicates(spec);
      scenario.save(gen_out);
      std::cout << gen_out << ": " << spec.setting_id() << ", " << scenario.environments.size()
                << " environments x " << spec.replicates << " replicates\n";
      return 0;
    }
    if (*train) {
      auto cfg = train_ov.harness();
      auto scenario = scos::ScenarioSet::load(train_scenario);
      std::vector<scos::PolicySpec> policies;
      for (const auto& p : parse_policies(train_policies))
        if (p.trained()) policies.push_back(p);
      for (const auto& env : scenario.environments) {
        scos::Instance inst(scenario.spec, env);
        for (const auto& p : policies) {
          auto model = scos::train_policy(p, inst, cfg);
          std::string file = p.name();
          std::replace(file.begin(), file.end(), ':', '_');
          auto path = fs::path(train_out) / scenario.spec.setting_id() /
                      (file + "_e" + std::to_string(env.index) + ".json");
          json j = model.to_json();
          j["config"] = cfg.to_json();
          j["scenario"] = scenario.spec.to_json();
          write_json(j, path.string());
          std::cout << path.string() << ": " << model.log.iterations << " iterations"
                    << (model.log.converged ? "" : " (not converged)") << '\n';
        }
      }
      return 0;
    }
    if (*run) {
      auto cfg = run_ov.harness();
      std::vector<scos::ScenarioSet> sets;
      for (const auto& s : run_scenarios) sets.push_back(scos::ScenarioSet::load(s));
      auto policies = parse_policies(run_policies);
      fs::create_directories(run_out);
      write_json(cfg.to_json(), (fs::path(run_out) / "config.json").string());
      auto runs = scos::run_matrix(sets, policies, cfg, run_out, run_verbose);
      int failures = 0;
      for (const auto& r : runs) {
        failures += r.failed;
        std::cout << r.setting << ' ' << r.policy << " e" << r.env << " r" << r.rep << " cost "
                  << r.cost << " digest " << std::hex << r.digest << std::dec << '\n';
      }
      if (failures) std::cerr << failures << " failed cells\n";
      return failures ? 1 : 0;
    }
    if (*eval) {
      auto runs = scos::load_runs(eval_dir);
      auto rows = scos::aggregate(runs);
      scos::write_report(rows, (fs::path(eval_dir) / "report.csv").string());
      std::cout << runs.size() << " runs, " << rows.size() << " report rows\n";
      return 0;
    }
    if (*rep) {
      auto runs = scos::load_runs(rep_dir);
      auto rows = scos::aggregate(runs);
      std::string out = rep_out.empty() ? (fs::path(rep_dir) / "plot.csv").string() : rep_out;
      write_plot_csv(rows, out);
      std::cout << out << '\n';
      return 0;
    }
    if (*ver) {
      auto results = scos::verify::run_property_checks(ver_seed);
      if (ver_slow) {
        results.push_back(scos::verify::check_convergence(ver_seed));
        results.push_back(scos::verify::check_accounting(ver_seed));
      }
      bool ok = true;
      for (const auto& r : results) {
        std::cout << scos::verify::format(r) << '\n';
        ok = ok && r.ok();
      }
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const scos::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == scos::ErrorCode::kConfig || e.code() == scos::ErrorCode::kDomain ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
