#include "scos/sensing.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <map>
#include <mutex>

#include "scos/errors.hpp"
#include "scos/grf_belief.hpp"

namespace scos {

double llr_noise_variance(double lambda) {
  if (!(lambda > 0.0 && lambda < 4.0)) throw Error(ErrorCode::kDomain, "lambda must lie in (0,4)");
  static std::mutex mu;
  static std::map<double, double> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(lambda); it != cache.end()) return it->second;
  }
  const double a = 4.0 + lambda, b = 4.0 - lambda;
  const double log_norm = -std::log(boost::math::beta(a, b));
  // Mixture density is symmetric under p -> 1-p and the LLR is odd, so the
  // mean is zero and the variance is the second moment.
  auto integrand = [&](double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    double lp = std::log(p), lq = std::log1p(-p);
    double f1 = std::exp(log_norm + (a - 1) * lp + (b - 1) * lq);
    double f0 = std::exp(log_norm + (b - 1) * lp + (a - 1) * lq);
    double l = 2.0 * lambda * (lp - lq);
    return 0.5 * (f1 + f0) * l * l;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double value = integrator.integrate(integrand, 0.0, 1.0);
  if (!std::isfinite(value) || value <= 0.0)
    throw Error(ErrorCode::kNumerical, "LLR variance quadrature failed");
  std::lock_guard lock(mu);
  cache.emplace(lambda, value);
  return value;
}

SensorModel::SensorModel(double lambda, double range, std::optional<double> noise_override)
    : lambda_(lambda), range_(range) {
  if (!(lambda > 0.0 && lambda < 4.0)) throw Error(ErrorCode::kConfig, "lambda must lie in (0,4)");
  if (!(range >= 0.0)) throw Error(ErrorCode::kConfig, "sensor range must be >= 0");
  noise_ = noise_override ? *noise_override : llr_noise_variance(lambda);
  if (!(noise_ > 0.0)) throw Error(ErrorCode::kConfig, "observation noise must be > 0");
}

double SensorModel::llr(double reading) const {
  if (!(reading > 0.0 && reading < 1.0)) throw Error(ErrorCode::kDomain, "reading outside (0,1)");
  return 2.0 * lambda_ * (std::log(reading) - std::log1p(-reading));
}

double read_sensor(const SensorModel& model, Point agent, const Obstacle& obstacle, bool blocked,
                   Rng& rng) {
  if (distance(agent, obstacle.center) > model.range())
    throw Error(ErrorCode::kOutOfRange, "obstacle beyond sensor range");
  BetaParams p = blocked ? model.blocked() : model.free();
  double r = beta_variate(p.alpha, p.beta, rng);
  // Keep the LLR finite if the draw rounds onto an endpoint.
  return std::clamp(r, 1e-15, 1.0 - 1e-15);
}

std::vector<Observation> observe_step(const SensorModel& model, const LatticeWorld& world,
                                      int vertex, const BeliefState& belief,
                                      const Statuses& truth, Rng& rng, int step) {
  std::vector<Observation> out;
  Point agent = world.point(vertex);
  for (int id : belief.ambiguous_ids()) {
    Observation o;
    o.obstacle = id;
    o.step = step;
    const Obstacle& ob = world.obstacle(id);
    if (distance(agent, ob.center) <= model.range()) {
      o.reading = read_sensor(model, agent, ob, truth[id] != 0, rng);
      o.llr = model.llr(o.reading);
      o.noise_variance = model.noise_variance();
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace scos
