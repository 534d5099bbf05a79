#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scos/grid_world.hpp"
#include "scos/rng.hpp"

namespace scos {

class BeliefState;

// Ground-truth statuses, 1 = blocked.
using Statuses = std::vector<std::uint8_t>;

struct BetaParams {
  double alpha;
  double beta;
};

// Variance of the LLR under the equal-weight mixture of the two class
// conditionals, by adaptive quadrature.
double llr_noise_variance(double lambda);

class SensorModel {
 public:
  SensorModel(double lambda, double range, std::optional<double> noise_override = std::nullopt);

  double lambda() const { return lambda_; }
  double range() const { return range_; }
  BetaParams blocked() const { return {4.0 + lambda_, 4.0 - lambda_}; }
  BetaParams free() const { return {4.0 - lambda_, 4.0 + lambda_}; }
  double noise_variance() const { return noise_; }

  // Beta density log ratio; the normalisers cancel, leaving 2*lambda*logit.
  double llr(double reading) const;

 private:
  double lambda_;
  double range_;
  double noise_;
};

struct Observation {
  int obstacle = -1;
  double reading = 0.5;
  double llr = 0.0;
  double noise_variance = kInf;  // +inf marks an out-of-range placeholder
  int step = 0;
  bool disambiguation = false;
};

double read_sensor(const SensorModel& model, Point agent, const Obstacle& obstacle, bool blocked,
                   Rng& rng);

// One reading per ambiguous obstacle within range, placeholders for the rest.
std::vector<Observation> observe_step(const SensorModel& model, const LatticeWorld& world,
                                      int vertex, const BeliefState& belief,
                                      const Statuses& truth, Rng& rng, int step);

}  // namespace scos
