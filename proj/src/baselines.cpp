#include "scos/baselines.hpp"

#include <cmath>
#include <set>

#include "scos/errors.hpp"

namespace scos {

double obstacle_penalty(PenaltyVariant variant, double cost, double rho, double dist_to_goal) {
  // Probabilities this close to 1 would diverge; they are clamped instead.
  rho = std::min(rho, kRhoCeiling);
  const double q = 1.0 - rho;
  if (variant == PenaltyVariant::kRD) return cost / q;
  return cost + std::pow(dist_to_goal / q, -std::log(q));
}

std::vector<double> penalty_charges(PenaltyVariant variant, const LatticeWorld& world,
                                    const BeliefState& belief) {
  std::vector<double> out(world.obstacle_count(), 0.0);
  const Point g = world.point(world.goal());
  for (const auto& ob : world.obstacles())
    out[ob.id] = obstacle_penalty(variant, ob.disambiguation_cost, belief.probability(ob.id),
                                  distance(ob.center, g));
  return out;
}

double penalty_path_cost(PenaltyVariant variant, const LatticeWorld& world, const BeliefState& belief,
                         std::span<const int> path) {
  const auto pen = penalty_charges(variant, world, belief);
  std::set<int> touched;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    int dir = direction_between(world, path[k], path[k + 1]);
    for (const Contact& c : world.contacts(path[k], dir))
      if (belief.ambiguous(c.obstacle)) touched.insert(c.obstacle);
  }
  double cost = path_length(world, path);
  for (int id : touched) cost += pen[id];
  return cost;
}

Decision penalty_policy_step(PenaltyVariant variant, const LatticeWorld& world,
                             const BeliefState& belief, int vertex) {
  const auto labels = belief.labels();
  const auto pen = penalty_charges(variant, world, belief);
  PathResult p = shortest_path(world, labels, vertex, world.goal(), Charges{pen});
  if (!p.reachable()) throw Error(ErrorCode::kUnreachable, "no path to the goal");
  Decision d;
  d.candidate_count = 1;
  Candidate& c = d.candidate;
  c.stop_vertex = world.goal();
  c.segment = {p.vertices.front()};
  for (std::size_t k = 0; k + 1 < p.vertices.size(); ++k) {
    int dir = direction_between(world, p.vertices[k], p.vertices[k + 1]);
    int hit = -1;
    for (const Contact& ct : world.contacts(p.vertices[k], dir))
      if (labels[ct.obstacle] == Label::kAmbiguousFree && (hit < 0 || ct.obstacle < hit)) hit = ct.obstacle;
    if (hit >= 0) {
      c.stop_vertex = p.vertices[k];
      c.obstacle = hit;
      break;
    }
    c.segment.push_back(p.vertices[k + 1]);
  }
  c.length = path_length(world, c.segment);
  d.cost = c.length + (c.is_goal() ? 0.0 : world.obstacle(c.obstacle).disambiguation_cost);
  d.scores = {p.cost};
  return d;
}

Decision PenaltyPolicy::decide(const StepView& view, Rng&) {
  return penalty_policy_step(variant_, *view.ctx.world, view.belief, view.vertex);
}

Decision HindsightRolloutPolicy::decide(const StepView& view, Rng& rng) {
  const LatticeWorld& world = *view.ctx.world;
  auto fallback = optimistic_fallback(view.ctx, view.belief.labels());
  auto value = [&](int v) { return (*fallback)[v]; };
  SuccessorScore score = [&](std::vector<Label>, int next, const Statuses& truth, double, Rng&) {
    std::vector<Label> full(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) full[i] = truth[i] ? Label::kBlocked : Label::kFree;
    auto d = cost_to_go(world, full, {}, world.goal(), next);
    return d[next];
  };
  return rollout_decide(view, config_, value, score, false, rng);
}

Decision OptimisticRolloutPolicy::decide(const StepView& view, Rng& rng) {
  const LatticeWorld& world = *view.ctx.world;
  auto fallback = optimistic_fallback(view.ctx, view.belief.labels());
  auto value = [&](int v) { return (*fallback)[v]; };
  Chooser first = [](const std::vector<CandidateEval>&, int, Rng&) { return 0; };
  EvalOptions opts{config_.gamma_scale, false};
  const int cap = config_.step_cap_factor * (world.width() + world.height());
  SuccessorScore score = [&](std::vector<Label> labels, int next, const Statuses& truth, double,
                             Rng& r) {
    Trajectory traj = simulate(view.ctx, cache_, view.belief.covariance(), std::move(labels), next,
                               truth, value, first, opts, cap, r);
    return traj.raw_cost();
  };
  return rollout_decide(view, config_, value, score, false, rng);
}

}  // namespace scos
