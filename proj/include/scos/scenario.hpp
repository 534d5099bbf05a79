#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "scos/grf_belief.hpp"
#include "scos/grid_world.hpp"
#include "scos/rng.hpp"
#include "scos/sensing.hpp"

namespace scos {

struct TrendWeights {
  double goal = 1.5;
  double isolation = 1.0;
  double isolation_radius = 0.0;  // 0 means 4 * radius
};

struct ScenarioSpec {
  std::string name = "scenario";
  int width = 50;
  int height = 25;
  int obstacles = 20;
  double radius = 3.5;
  double disambiguation_cost = -1.0;  // negative means equal to the radius
  double sensor_range = 12.5;
  double lambda = 1.5;
  double env_sigma_f = 1.5;
  double env_length_scale = 0.0;      // 0 means 2 * radius
  double belief_sigma_f = 1.5;
  double belief_length_scale = 0.0;   // 0 means 2 * radius
  TrendWeights trend;
  double margin = 2.0;
  int environments = 1;
  int replicates = 1;
  std::uint64_t seed = 0;
  int max_attempts = 200;

  void validate() const;
  double cost() const { return disambiguation_cost < 0 ? radius : disambiguation_cost; }
  Kernel env_kernel() const;
  Kernel belief_kernel() const;
  double isolation_radius() const;
  // Stable identifier of the parameter setting, used as the report key.
  std::string setting_id() const;

  nlohmann::json to_json() const;
  static ScenarioSpec from_json(const nlohmann::json& j);
};

struct GroundTruth {
  std::vector<Obstacle> obstacles;
  std::vector<double> latent;
  std::vector<double> probability;
  Statuses status;
};

struct Environment {
  int index = 0;
  std::vector<Obstacle> obstacles;
  std::vector<double> latent;
  std::vector<double> probability;
  std::vector<Statuses> replicates;
};

struct ScenarioSet {
  ScenarioSpec spec;
  std::vector<Environment> environments;

  nlohmann::json to_json() const;
  static ScenarioSet from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static ScenarioSet load(const std::string& path);
};

// True when the goal is reachable from the start with every obstacle in
// `blocked` (status 1) treated as impassable.
bool feasible(const LatticeWorld& world, const Statuses& blocked);

std::vector<Obstacle> place_obstacles(const ScenarioSpec& spec, Rng& rng);
// Trend components, each mapped affinely onto [0, 1] and centred at zero.
std::vector<double> goal_trend(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles);
std::vector<double> isolation_trend(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles);
std::vector<double> sample_latent(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                                  Rng& rng);
Statuses sample_statuses(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                         const std::vector<double>& probability, Rng& rng);
GroundTruth sample_ground_truth(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                                Rng& rng);

Environment build_environment(const ScenarioSpec& spec, int index);
ScenarioSet build_replicates(const ScenarioSpec& spec);

LatticeWorld make_world(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles);
BeliefState make_prior(const ScenarioSpec& spec, const std::vector<Obstacle>& obstacles,
                       CorrelationMode mode = CorrelationMode::kFull);

}  // namespace scos
