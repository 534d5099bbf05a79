#include "scos/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "scos/errors.hpp"
#include "scos/info_gain.hpp"

namespace scos {

PlanningContext PlanningContext::make(const LatticeWorld& world, double sensor_range,
                                      double noise_variance) {
  PlanningContext ctx;
  ctx.world = &world;
  ctx.sensor_range = sensor_range;
  ctx.noise_variance = noise_variance;
  ctx.charges = disambiguation_charges(world);
  ctx.in_range.resize(world.vertex_count());
  for (int v = 0; v < world.vertex_count(); ++v)
    ctx.in_range[v] = world.obstacles_within(v, sensor_range);
  return ctx;
}

std::size_t DecisionCache::Hash::operator()(const Key& k) const {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(k.vertex);
  for (Label l : k.labels) h = (h ^ static_cast<std::uint8_t>(l)) * 0x100000001b3ULL;
  return static_cast<std::size_t>(h);
}

const DecisionSet& DecisionCache::get(const LatticeWorld& world, const std::vector<Label>& labels,
                                      int vertex) {
  Key key{vertex, labels};
  if (auto it = map_.find(key); it != map_.end()) return *it->second;
  if (map_.size() >= capacity_) map_.clear();
  auto ds = std::make_shared<const DecisionSet>(identify_decisions(world, labels, vertex));
  return *map_.emplace(std::move(key), std::move(ds)).first->second;
}

std::vector<int> ambiguous_in_range(const PlanningContext& ctx, const std::vector<Label>& labels,
                                    int vertex) {
  std::vector<int> ids;
  for (int id : ctx.in_range[vertex])
    if (labels[id] == Label::kAmbiguousFree) ids.push_back(id);
  return ids;
}

std::vector<CandidateEval> evaluate_candidates(const PlanningContext& ctx,
                                               const Eigen::MatrixXd& cov,
                                               const std::vector<Label>& labels,
                                               const DecisionSet& decisions, double past_mi,
                                               const std::function<double(int)>& value,
                                               const EvalOptions& options, double* gamma_out) {
  std::vector<CandidateEval> out;
  out.reserve(decisions.candidates.size());
  std::vector<double> q;
  for (std::size_t k = 0; k < decisions.candidates.size(); ++k) {
    const Candidate& c = decisions.candidates[k];
    CandidateEval e;
    e.index = static_cast<int>(k);
    e.next = c.stop_vertex;
    e.obstacle = c.obstacle;
    e.cost = ctx.decision_cost(c);
    e.value = c.is_goal() ? 0.0 : value(c.stop_vertex);
    if (options.use_bonus) {
      auto ids = ambiguous_in_range(ctx, labels, c.stop_vertex);
      e.mi = mutual_information(cov, ids, ctx.noise_variance);
    }
    q.push_back(e.cost + e.value);
    out.push_back(e);
  }
  double gamma = 0.0;
  if (options.use_bonus && out.size() > 1) {
    double cap = decisions.exploit_cost;
    if (!std::isfinite(cap)) {
      cap = 0.0;
      for (double v : q)
        if (std::isfinite(v)) cap = std::max(cap, v);
    }
    gamma = bonus_scale(q, options.gamma_scale, cap);
    for (auto& e : out) e.bonus = info_bonus(past_mi, e.mi, gamma);
  }
  if (gamma_out) *gamma_out = gamma;
  return out;
}

double Trajectory::raw_cost() const {
  double s = 0.0;
  for (const auto& st : steps) s += st.cost;
  return s;
}

Trajectory simulate(const PlanningContext& ctx, DecisionCache& cache, const Eigen::MatrixXd& cov,
                    std::vector<Label> labels, int start, const Statuses& truth,
                    const std::function<double(int)>& value, const Chooser& choose,
                    const EvalOptions& options, int step_cap, Rng& rng, double past_mi) {
  Trajectory traj;
  const int goal = ctx.world->goal();
  int v = start;
  for (int t = 0; v != goal; ++t) {
    if (t >= step_cap) {
      traj.truncated = true;
      break;
    }
    const DecisionSet* dsp = nullptr;
    try {
      dsp = &cache.get(*ctx.world, labels, v);
    } catch (const Error& err) {
      // A sampled world can wall off the goal when the generator's corridor
      // guarantee does not apply; treat it like a runaway trajectory.
      if (err.code() != ErrorCode::kNoCandidates) throw;
      traj.truncated = true;
      break;
    }
    const DecisionSet& ds = *dsp;
    auto evals = evaluate_candidates(ctx, cov, labels, ds, past_mi, value, options);
    int pick = choose(evals, t, rng);
    const CandidateEval& e = evals[pick];
    traj.steps.push_back({v, e.next, e.obstacle, e.cost, e.bonus, e.mi});
    past_mi += e.mi;
    if (e.obstacle != kGoal) reveal(labels, e.obstacle, truth);
    v = e.next;
  }
  return traj;
}

}  // namespace scos
