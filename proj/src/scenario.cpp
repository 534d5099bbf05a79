#include "scos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scos/errors.hpp"

namespace scos {

void ScenarioSpec::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::kConfig, m); };
  if (width < 3 || height < 3) bad("grid must be at least 3x3");
  if (obstacles < 0) bad("obstacle count must be >= 0");
  if (!(radius > 0)) bad("radius must be > 0");
  if (!(lambda > 0 && lambda < 4)) bad("lambda must lie in (0,4)");
  if (!(sensor_range >= 0)) bad("sensor range must be >= 0");
  if (!(env_sigma_f >= 0) || !(belief_sigma_f > 0)) bad("kernel sigma_f out of range");
  if (env_length_scale < 0 || belief_length_scale < 0) bad("kernel length scale must be >= 0");
  if (margin < 0) bad("margin must be >= 0");
  if (environments < 1 || replicates < 1) bad("need at least one environment and replicate");
  if (obstacles > 0 && (1 + margin + radius > width - margin - radius ||
                        1 + margin + radius > height - margin - radius))
    bad("grid too small for the obstacle radius and margin");
}

Kernel ScenarioSpec::env_kernel() const {
  return {env_sigma_f, env_length_scale > 0 ? env_length_scale : 2.0 * radius};
}

Kernel ScenarioSpec::belief_kernel() const {
  return {belief_sigma_f, belief_length_scale > 0 ? belief_length_scale : 2.0 * radius};
}

double ScenarioSpec::isolation_radius() const {
  return trend.isolation_radius > 0 ? trend.isolation_radius : 4.0 * radius;
}

std::string ScenarioSpec::setting_id() const {
  std::ostringstream os;
  os << width << "x" << height << "_n" << obstacles << "_lam" << lambda << "_R" << sensor_range;
  return os.str();
}

nlohmann::json ScenarioSpec::to_json() const {
  return {{"name", name},
          {"width", width},
          {"height", height},
          {"obstacles", obstacles},
          {"radius", radius},
          {"disambiguation_cost", cost()},
          {"sensor_range", sensor_range},
          {"lambda", lambda},
          {"env_sigma_f", env_sigma_f},
          {"env_length_scale", env_kernel().length_scale},
          {"belief_sigma_f", belief_sigma_f},
          {"belief_length_scale", belief_kernel().length_scale},
          {"trend_goal", trend.goal},
          {"trend_isolation", trend.isolation},
          {"isolation_radius", isolation_radius()},
          {"margin", margin},
          {"environments", environments},
          {"replicates", replicates},
          {"seed", seed},
          {"max_attempts", max_attempts}};
}

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  s.name = j.value("name", s.name);
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.obstacles = j.value("obstacles", s.obstacles);
  s.radius = j.value("radius", s.radius);
  s.disambiguation_cost = j.value("disambiguation_cost", s.disambiguation_cost);
  s.sensor_range = j.value("sensor_range", s.sensor_range);
  s.lambda = j.value("lambda", s.lambda);
  s.env_sigma_f = j.value("env_sigma_f", s.env_sigma_f);
  s.env_length_scale = j.value("env_length_scale", s.env_length_scale);
  s.belief_sigma_f = j.value("belief_sigma_f", s.belief_sigma_f);
  s.belief_length_scale = j.value("belief_length_scale", s.belief_length_scale);
  s.trend.goal = j.value("trend_goal", s.trend.goal);
  s.trend.isolation = j.value("trend_isolation", s.trend.isolation);
  s.trend.isolation_radius = j.value("isolation_radius", s.trend.isolation_radius);
  s.margin = j.value("margin", s.margin);
  s.environments = j.value("environments", s.environments);
  s.replicates = j.value("replicates", s.replicates);
  s.seed = j.value("seed", s.seed);
  s.max_attempts = j.value("max_attempts", s.max_attempts);
  s.validate();
  return s;
}

bool feasible(const LatticeWorld& world, const Statuses& blocked) {
  std::vector<Label> labels(world.obstacle_count());
  for (int i = 0; i < world.obstacle_count(); ++i)
    labels[i] = blocked[i] ? Label::kBlocked : Label::kFree;
  auto d = cost_to_go(world, labels, {}, world.goal(), world.start());
  return std::isfinite(d[world.start()]);
}

LatticeWorld make_world(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles) {
  return LatticeWorld(spec.width, spec.height, obstacles);
}

BeliefState make_prior(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                       CorrelationMode mode) {
  return BeliefState(kernel_matrix(spec.belief_kernel(), obstacles), mode);
}

std::vector<Obstacle> place_obstacles(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  const double lo_x = 1 + spec.margin + spec.radius, hi_x = spec.width - spec.margin - spec.radius;
  const double lo_y = 1 + spec.margin + spec.radius, hi_y = spec.height - spec.margin - spec.radius;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    std::vector<Obstacle> obs;
    for (int k = 0; k < spec.obstacles; ++k) {
      Obstacle o;
      o.id = k;
      o.center = {lo_x + (hi_x - lo_x) * uniform01(rng), lo_y + (hi_y - lo_y) * uniform01(rng)};
      o.radius = spec.radius;
      o.disambiguation_cost = spec.cost();
      obs.push_back(o);
    }
    LatticeWorld world = make_world(spec, obs);
    if (feasible(world, Statuses(obs.size(), 1))) return obs;
  }
  throw Error(ErrorCode::kGenerationFailed, "no feasible obstacle layout within the attempt budget");
}

namespace {

std::vector<double> centred_unit(const std::vector<double>& raw, bool decreasing) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  auto [mn, mx] = std::minmax_element(raw.begin(), raw.end());
  if (*mx - *mn <= 1e-12) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double u = (raw[i] - *mn) / (*mx - *mn);
    out[i] = (decreasing ? 1.0 - u : u) - 0.5;
  }
  return out;
}

}  // namespace

std::vector<double> goal_trend(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles) {
  Point g{static_cast<double>(spec.width / 2), 1.0};
  std::vector<double> d;
  for (const auto& o : obstacles) d.push_back(distance(o.center, g));
  return centred_unit(d, true);
}

std::vector<double> isolation_trend(const ScenarioSpec& spec,
                                    const std::vector<Obstacle>& obstacles) {
  const double r = spec.isolation_radius();
  std::vector<double> count;
  for (const auto& a : obstacles) {
    int n = 0;
    for (const auto& b : obstacles)
      if (a.id != b.id && distance(a.center, b.center) <= r) ++n;
    count.push_back(n);
  }
  return centred_unit(count, true);
}

std::vector<double> sample_latent(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                                  Rng& rng) {
  const auto n = static_cast<Eigen::Index>(obstacles.size());
  auto tg = goal_trend(spec, obstacles);
  auto ti = isolation_trend(spec, obstacles);
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(n);
  if (spec.env_sigma_f > 0 && n > 0) {
    Eigen::MatrixXd K = kernel_matrix(spec.env_kernel(), obstacles);
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::kNumerical, "environment kernel not SPD");
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = standard_normal(rng);
    eps = llt.matrixL() * z;
  }
  std::vector<double> y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y[i] = spec.trend.goal * tg[i] + spec.trend.isolation * ti[i] + eps[i];
  return y;
}

Statuses sample_statuses(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                         const std::vector<double>& probability, Rng& rng) {
  LatticeWorld world = make_world(spec, obstacles);
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    Statuses z(obstacles.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = uniform01(rng) < probability[i] ? 1 : 0;
    if (feasible(world, z)) return z;
  }
  throw Error(ErrorCode::kGenerationFailed, "no feasible status draw within the attempt budget");
}

GroundTruth sample_ground_truth(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                                Rng& rng) {
  GroundTruth g;
  g.obstacles = obstacles;
  g.latent = sample_latent(spec, obstacles, rng);
  for (double y : g.latent) g.probability.push_back(logistic(y));
  g.status = sample_statuses(spec, obstacles, g.probability, rng);
  return g;
}

Environment build_environment(const ScenarioSpec& spec, int index) {
  Environment env;
  env.index = index;
  for (int attempt = 0;; ++attempt) {
    try {
      Rng layout = make_rng(spec.seed, {kStreamLayout, std::uint64_t(index), std::uint64_t(attempt)});
      env.obstacles = place_obstacles(spec, layout);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kGenerationFailed || attempt >= 10) throw;
    }
  }
  Rng latent = make_rng(spec.seed, {kStreamLatent, std::uint64_t(index)});
  env.latent = sample_latent(spec, env.obstacles, latent);
  for (double y : env.latent) env.probability.push_back(logistic(y));
  for (int m = 0; m < spec.replicates; ++m) {
    Rng status = make_rng(spec.seed, {kStreamStatus, std::uint64_t(index), std::uint64_t(m)});
    env.replicates.push_back(sample_statuses(spec, env.obstacles, env.probability, status));
  }
  return env;
}

ScenarioSet build_replicates(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioSet set{spec, {}};
  for (int e = 0; e < spec.environments; ++e) set.environments.push_back(build_environment(spec, e));
  return set;
}

nlohmann::json ScenarioSet::to_json() const {
  nlohmann::json j;
  j["format"] = "scos-scenario/1";
  j["spec"] = spec.to_json();
  j["setting_id"] = spec.setting_id();
  auto& envs = j["environments"] = nlohmann::json::array();
  for (const auto& e : environments) {
    nlohmann::json je;
    je["index"] = e.index;
    auto& obs = je["obstacles"] = nlohmann::json::array();
    for (const auto& o : e.obstacles)
      obs.push_back({{"id", o.id},
                     {"x", o.center.x},
                     {"y", o.center.y},
                     {"radius", o.radius},
                     {"cost", o.disambiguation_cost}});
    je["latent"] = e.latent;
    je["probability"] = e.probability;
    auto& reps = je["replicates"] = nlohmann::json::array();
    for (const auto& z : e.replicates) reps.push_back(std::vector<int>(z.begin(), z.end()));
    envs.push_back(std::move(je));
  }
  return j;
}

ScenarioSet ScenarioSet::from_json(const nlohmann::json& j) {
  ScenarioSet set;
  set.spec = ScenarioSpec::from_json(j.at("spec"));
  for (const auto& je : j.at("environments")) {
    Environment e;
    e.index = je.at("index").get<int>();
    for (const auto& o : je.at("obstacles"))
      e.obstacles.push_back({o.at("id").get<int>(),
                             {o.at("x").get<double>(), o.at("y").get<double>()},
                             o.at("radius").get<double>(),
                             o.at("cost").get<double>()});
    e.latent = je.at("latent").get<std::vector<double>>();
    e.probability = je.at("probability").get<std::vector<double>>();
    for (const auto& z : je.at("replicates")) {
      auto v = z.get<std::vector<int>>();
      e.replicates.emplace_back(v.begin(), v.end());
    }
    set.environments.push_back(std::move(e));
  }
  return set;
}

void ScenarioSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path);
  out << to_json().dump(1) << "\n";
}

ScenarioSet ScenarioSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed scenario file: ") + e.what());
  }
  return from_json(j);
}

}  // namespace scos
