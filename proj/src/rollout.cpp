#include "scos/rollout.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "scos/errors.hpp"

namespace scos {

nlohmann::json BaseUpdate::to_json() const {
  const char* k = kind == Kind::kMonteCarlo ? "mc" : kind == Kind::kProject ? "project" : "refine";
  return {{"kind", k}, {"state", state}, {"next", next}, {"value", value}};
}

BaseUpdate BaseUpdate::from_json(const nlohmann::json& j) {
  BaseUpdate u;
  auto k = j.at("kind").get<std::string>();
  u.kind = k == "mc" ? Kind::kMonteCarlo : k == "project" ? Kind::kProject : Kind::kRefine;
  u.state = j.at("state").get<int>();
  u.next = j.at("next").get<int>();
  u.value = j.at("value").get<double>();
  return u;
}

double BaseModel::estimate(int v) const {
  return kind_ == Kind::kPoint ? point_.value(v) : dist_.mean(v);
}

void BaseModel::apply(const BaseUpdate& u) {
  switch (u.kind) {
    case BaseUpdate::Kind::kMonteCarlo:
      point_.update(u.state, u.value);
      break;
    case BaseUpdate::Kind::kProject: {
      ValueDistribution next = u.next == dist_.goal() ? ValueDistribution::point_mass(0.0)
                                                      : dist_.at(u.next);
      dist_.at(u.state).bellman_project(next, u.value);
      break;
    }
    case BaseUpdate::Kind::kRefine:
      dist_.at(u.state).refine(u.value);
      break;
  }
}

nlohmann::json BaseModel::to_json() const {
  if (kind_ == Kind::kPoint) return {{"kind", "point"}, {"table", point_.to_json()}};
  return {{"kind", "distributional"}, {"table", dist_.to_json()}};
}

void RolloutConfig::validate() const {
  if (samples < 0) throw Error(ErrorCode::kConfig, "rollout samples must be >= 0");
  if (gamma_scale < 0) throw Error(ErrorCode::kConfig, "gamma scale must be >= 0");
  if (step_cap_factor < 1) throw Error(ErrorCode::kConfig, "step cap factor must be >= 1");
}

Decision rollout_decide(const StepView& view, const RolloutConfig& config,
                        const std::function<double(int)>& base_value, const SuccessorScore& score,
                        bool direct, Rng& rng) {
  const LatticeWorld& world = *view.ctx.world;
  const auto labels = view.belief.labels();
  DecisionSet ds = identify_decisions(world, labels, view.vertex);
  Decision d;
  d.discarded = prune_search_space(world, labels, view.vertex, ds);
  EvalOptions opts{config.gamma_scale, config.use_bonus};
  auto evals = evaluate_candidates(view.ctx, view.belief.covariance(), labels, ds, view.past_mi,
                                   base_value, opts, &d.gamma);
  const std::size_t n = evals.size();
  d.scores.assign(n, 0.0);
  if (direct || !score || config.samples == 0 || n == 1) {
    for (std::size_t k = 0; k < n; ++k) d.scores[k] = evals[k].cost + evals[k].value;
  } else {
    const auto sim_labels = view.belief.labels(d.discarded);
    std::vector<double> acc(n, 0.0);
    for (int m = 0; m < config.samples; ++m) {
      Statuses truth = view.belief.sample_environment(rng, d.discarded);
      for (std::size_t k = 0; k < n; ++k) {
        if (evals[k].next == world.goal()) continue;
        auto lab = sim_labels;
        if (evals[k].obstacle != kGoal) reveal(lab, evals[k].obstacle, truth);
        acc[k] += score(std::move(lab), evals[k].next, truth, view.past_mi + evals[k].mi, rng);
      }
    }
    for (std::size_t k = 0; k < n; ++k) d.scores[k] = evals[k].cost + acc[k] / config.samples;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (d.scores[k] < d.scores[best]) best = k;
  d.index = static_cast<int>(best);
  d.candidate_count = static_cast<int>(n);
  d.candidate = ds.candidates[best];
  d.cost = evals[best].cost;
  d.mi = evals[best].mi;
  d.bonus = evals[best].bonus;
  return d;
}

TwoStagePolicy::TwoStagePolicy(std::string name, BaseModel base, RolloutConfig config)
    : name_(std::move(name)), base_(std::move(base)), config_(config) {
  config_.validate();
}

Decision TwoStagePolicy::decide(const StepView& view, Rng& rng) {
  const LatticeWorld& world = *view.ctx.world;
  auto value = [this](int v) { return base_.estimate(v); };
  Chooser greedy = [](const std::vector<CandidateEval>& evals, int, Rng&) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(evals.size()); ++k)
      if (evals[k].q() < evals[best].q()) best = k;
    return best;
  };
  const int cap = config_.step_cap_factor * (world.width() + world.height());
  EvalOptions opts{config_.gamma_scale, config_.use_bonus};
  SuccessorScore score = [&](std::vector<Label> labels, int next, const Statuses& truth,
                             double past_mi, Rng& r) {
    Trajectory traj = simulate(view.ctx, cache_, view.belief.covariance(), std::move(labels), next,
                               truth, value, greedy, opts, cap, r, past_mi);
    double c = traj.raw_cost();
    if (traj.truncated) {
      int last = traj.steps.empty() ? next : traj.steps.back().next;
      c += base_.estimate(last);
    }
    return c;
  };
  return rollout_decide(view, config_, value, score, view.step == 0, rng);
}

std::vector<BaseUpdate> TwoStagePolicy::after_step(int from, int to, double adjusted) {
  realised_.push_back({from, adjusted});
  BaseUpdate u;
  u.state = from;
  u.next = to;
  if (base_.kind() == BaseModel::Kind::kPoint) {
    u.kind = BaseUpdate::Kind::kMonteCarlo;
    u.value = adjusted + base_.estimate(to);
  } else {
    u.kind = BaseUpdate::Kind::kProject;
    u.value = adjusted;
  }
  base_.apply(u);
  return {u};
}

std::vector<BaseUpdate> TwoStagePolicy::end_episode() {
  std::vector<BaseUpdate> out;
  if (base_.kind() == BaseModel::Kind::kDistributional) {
    std::vector<double> tail(realised_.size() + 1, 0.0);
    for (std::size_t k = realised_.size(); k-- > 0;) tail[k] = tail[k + 1] + realised_[k].second;
    std::set<int> seen;
    for (std::size_t k = 0; k < realised_.size(); ++k) {
      int s = realised_[k].first;
      if (s == base_.distribution().goal() || !seen.insert(s).second) continue;
      BaseUpdate u{BaseUpdate::Kind::kRefine, s, -1, tail[k]};
      base_.apply(u);
      out.push_back(u);
    }
  }
  realised_.clear();
  return out;
}

bool EpisodeTrace::accounting_holds(double tol) const {
  double len = 0.0, dis = 0.0, adj = 0.0;
  for (const auto& s : steps) {
    len += s.segment_length;
    dis += s.disambiguation_cost;
    adj += s.segment_length + s.disambiguation_cost - s.decision.bonus;
  }
  auto close = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
  return close(len, path_length) && close(dis, disambiguation_cost) &&
         close(len + dis, total_cost) && close(adj, adjusted_cost);
}

namespace {

nlohmann::json observations_json(const std::vector<Observation>& obs) {
  auto arr = nlohmann::json::array();
  for (const auto& o : obs)
    if (std::isfinite(o.noise_variance)) arr.push_back({o.obstacle, o.reading, o.llr});
  return arr;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

}  // namespace

std::vector<nlohmann::json> EpisodeTrace::records(const nlohmann::json& summary_extra) const {
  std::vector<nlohmann::json> out;
  out.push_back({{"type", "start"}, {"policy", policy}, {"observations", observations_json(initial_observations)}});
  for (const auto& s : steps) {
    nlohmann::json r;
    r["type"] = "step";
    r["t"] = s.t;
    r["vertex"] = s.vertex;
    r["stop"] = s.decision.candidate.stop_vertex;
    r["obstacle"] = s.decision.candidate.obstacle;
    r["candidate"] = s.decision.index;
    r["candidates"] = s.decision.candidate_count;
    r["scores"] = s.decision.scores;
    r["discarded"] = s.decision.discarded;
    r["segment"] = s.decision.candidate.segment;
    r["segment_length"] = s.segment_length;
    r["disambiguation"] = s.disambiguated == kGoal
                              ? nlohmann::json(nullptr)
                              : nlohmann::json{{"obstacle", s.disambiguated},
                                               {"blocked", s.revealed_blocked},
                                               {"cost", s.disambiguation_cost}};
    r["cost"] = s.segment_length + s.disambiguation_cost;
    r["mi"] = s.decision.mi;
    r["gamma"] = s.decision.gamma;
    r["bonus"] = s.decision.bonus;
    r["adjusted_cost"] = s.segment_length + s.disambiguation_cost - s.decision.bonus;
    r["observations"] = observations_json(s.observations);
    r["belief"] = hex(s.belief_digest);
    auto ups = nlohmann::json::array();
    for (const auto& u : s.updates) ups.push_back(u.to_json());
    r["base_updates"] = ups;
    out.push_back(std::move(r));
  }
  nlohmann::json sum;
  sum["type"] = "summary";
  sum["policy"] = policy;
  sum["path_length"] = path_length;
  sum["disambiguation_cost"] = disambiguation_cost;
  sum["total_cost"] = total_cost;
  sum["adjusted_cost"] = adjusted_cost;
  sum["steps"] = steps.size();
  sum["reached_goal"] = reached_goal;
  sum["failed"] = failed;
  sum["failure"] = failure;
  auto ups = nlohmann::json::array();
  for (const auto& u : final_updates) ups.push_back(u.to_json());
  sum["final_updates"] = ups;
  if (summary_extra.is_object())
    for (auto it = summary_extra.begin(); it != summary_extra.end(); ++it) sum[it.key()] = it.value();
  out.push_back(std::move(sum));
  return out;
}

std::string EpisodeTrace::jsonl(const nlohmann::json& summary_extra) const {
  std::string s;
  for (const auto& r : records(summary_extra)) {
    s += r.dump();
    s += '\n';
  }
  return s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

namespace {

// Every edge of an executed segment may only touch obstacles already revealed
// free; anything else means a planner handed out an unsafe segment.
void check_segment(const LatticeWorld& world, const BeliefState& belief, const Statuses& truth,
                   const std::vector<int>& segment) {
  for (std::size_t k = 0; k + 1 < segment.size(); ++k) {
    int dir = direction_between(world, segment[k], segment[k + 1]);
    if (dir < 0) throw Error(ErrorCode::kInvariant, "segment has a non-adjacent step");
    for (const Contact& c : world.contacts(segment[k], dir)) {
      if (truth[c.obstacle] || belief.knowledge(c.obstacle) != Knowledge::kFree)
        throw Error(ErrorCode::kInvariant,
                    "segment crosses obstacle " + std::to_string(c.obstacle) + " before it is cleared");
    }
  }
}

}  // namespace

EpisodeTrace execute_episode(const PlanningContext& ctx, const SensorModel& sensor,
                             const Statuses& truth, BeliefState belief, Policy& policy,
                             const EpisodeConfig& config, Rng& rng) {
  auto t0 = std::chrono::steady_clock::now();
  const LatticeWorld& world = *ctx.world;
  EpisodeTrace trace;
  trace.policy = policy.name();
  int v = world.start();
  trace.initial_observations = observe_step(sensor, world, v, belief, truth, rng, 0);
  belief.observe(trace.initial_observations);
  double past_mi = 0.0;
  const int cap = config.step_cap_factor * (world.width() + world.height());
  try {
    for (int t = 0; v != world.goal(); ++t) {
      if (t >= cap) throw Error(ErrorCode::kStepCapExceeded, "step cap reached");
      TraceStep step;
      step.t = t;
      step.vertex = v;
      step.decision = policy.decide(StepView{ctx, belief, v, t, past_mi}, rng);
      const Candidate& c = step.decision.candidate;
      if (c.segment.empty() || c.segment.front() != v || c.segment.back() != c.stop_vertex)
        throw Error(ErrorCode::kInvariant, "decision segment does not start at the agent");
      check_segment(world, belief, truth, c.segment);
      step.segment_length = path_length(world, c.segment);
      v = c.stop_vertex;
      if (!c.is_goal()) {
        step.disambiguated = c.obstacle;
        step.revealed_blocked = truth[c.obstacle] != 0;
        step.disambiguation_cost = world.obstacle(c.obstacle).disambiguation_cost;
        belief.apply_disambiguation(c.obstacle, step.revealed_blocked);
      }
      if (v != world.goal()) {
        step.observations = observe_step(sensor, world, v, belief, truth, rng, t + 1);
        belief.observe(step.observations);
      }
      step.belief_digest = belief.digest();
      past_mi += step.decision.mi;
      double raw = step.segment_length + step.disambiguation_cost;
      step.updates = policy.after_step(step.vertex, v, raw - step.decision.bonus);
      trace.path_length += step.segment_length;
      trace.disambiguation_cost += step.disambiguation_cost;
      trace.total_cost += raw;
      trace.adjusted_cost += raw - step.decision.bonus;
      trace.steps.push_back(std::move(step));
    }
    trace.reached_goal = true;
    trace.final_updates = policy.end_episode();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvariant) throw;
    trace.failed = true;
    trace.failure = e.what();
  }
  trace.online_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

}  // namespace scos
