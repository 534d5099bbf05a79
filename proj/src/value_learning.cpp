#include "scos/value_learning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "scos/errors.hpp"

namespace scos {

std::string to_string(Exploration e) {
  switch (e) {
    case Exploration::kGreedy: return "greedy";
    case Exploration::kEpsilonGreedy: return "eps_greedy";
    case Exploration::kSoftmax: return "softmax";
  }
  return "greedy";
}

Exploration exploration_from_string(const std::string& s) {
  if (s == "greedy") return Exploration::kGreedy;
  if (s == "eps_greedy" || s == "eps") return Exploration::kEpsilonGreedy;
  if (s == "softmax") return Exploration::kSoftmax;
  throw Error(ErrorCode::kConfig, "unknown exploration '" + s + "'");
}

void OpiConfig::validate() const {
  if (!(eta > 0)) throw Error(ErrorCode::kConfig, "eta must be > 0");
  if (!(beta > 0)) throw Error(ErrorCode::kConfig, "beta must be > 0");
  if (!(epsilon0 >= 0 && epsilon0 <= 1)) throw Error(ErrorCode::kConfig, "epsilon0 must be in [0,1]");
  if (!(epsilon_decay > 0 && epsilon_decay <= 1))
    throw Error(ErrorCode::kConfig, "epsilon decay must be in (0,1]");
  if (max_iterations < 1) throw Error(ErrorCode::kConfig, "max_iterations must be >= 1");
  if (gamma_scale < 0) throw Error(ErrorCode::kConfig, "gamma scale must be >= 0");
  if (window < 1 || min_visits < 0 || truncation_factor < 1)
    throw Error(ErrorCode::kConfig, "bad convergence window settings");
}

double ValueTable::value(int v) const {
  if (v == goal_) return 0.0;
  if (auto it = entries_.find(v); it != entries_.end()) return it->second.value;
  return fallback_ ? (*fallback_)[v] : 0.0;
}

int ValueTable::visits(int v) const {
  auto it = entries_.find(v);
  return it == entries_.end() ? 0 : it->second.visits;
}

void ValueTable::update(int v, double target) {
  if (v == goal_) return;
  Entry& e = entries_[v];
  e.visits += 1;
  e.value += (target - e.value) / e.visits;
}

nlohmann::json ValueTable::to_json() const {
  nlohmann::json j;
  j["goal"] = goal_;
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& [v, e] : entries_) arr.push_back({{"vertex", v}, {"value", e.value}, {"visits", e.visits}});
  return j;
}

ValueTable ValueTable::from_json(const nlohmann::json& j,
                                 std::shared_ptr<const std::vector<double>> fallback) {
  ValueTable t(j.at("goal").get<int>(), std::move(fallback));
  for (const auto& e : j.at("entries"))
    t.entries_[e.at("vertex").get<int>()] = {e.at("value").get<double>(), e.at("visits").get<int>()};
  return t;
}

nlohmann::json TrainingLog::to_json() const {
  return {{"iterations", iterations},
          {"converged", converged},
          {"truncated", truncated},
          {"max_change", max_change},
          {"seconds", seconds}};
}

void mc_update(ValueTable& table, const Trajectory& trajectory) {
  const auto& st = trajectory.steps;
  std::vector<double> tail(st.size() + 1, 0.0);
  for (std::size_t k = st.size(); k-- > 0;) tail[k] = tail[k + 1] + st[k].cost - st[k].bonus;
  std::set<int> seen;
  for (std::size_t k = 0; k < st.size(); ++k)
    if (seen.insert(st[k].state).second) table.update(st[k].state, tail[k]);
}

int improve_policy(const std::vector<CandidateEval>& evals, Exploration exploration,
                   const OpiConfig& config, int step, Rng& rng) {
  if (evals.empty()) throw Error(ErrorCode::kNoCandidates, "empty decision set");
  int best = 0;
  for (int k = 1; k < static_cast<int>(evals.size()); ++k)
    if (evals[k].q() < evals[best].q()) best = k;
  if (evals.size() == 1) return 0;
  switch (exploration) {
    case Exploration::kGreedy:
      return best;
    case Exploration::kEpsilonGreedy: {
      double eps = config.epsilon0 * std::pow(config.epsilon_decay, step);
      if (uniform01(rng) >= eps) return best;
      int pick = static_cast<int>(uniform01(rng) * (evals.size() - 1));
      pick = std::min(pick, static_cast<int>(evals.size()) - 2);
      return pick >= best ? pick + 1 : pick;
    }
    case Exploration::kSoftmax: {
      double lo = evals[best].q();
      std::vector<double> w(evals.size());
      double total = 0.0;
      for (std::size_t k = 0; k < evals.size(); ++k) total += w[k] = std::exp(-config.beta * (evals[k].q() - lo));
      double u = uniform01(rng) * total;
      for (std::size_t k = 0; k < evals.size(); ++k) {
        if (u < w[k]) return static_cast<int>(k);
        u -= w[k];
      }
      return best;
    }
  }
  return best;
}

std::shared_ptr<const std::vector<double>> optimistic_fallback(const PlanningContext& ctx,
                                                               const std::vector<Label>& labels) {
  return std::make_shared<const std::vector<double>>(
      cost_to_go(*ctx.world, labels, Charges{ctx.charges}, ctx.world->goal()));
}

std::vector<TrainingStart> training_starts(const DecisionSet& root_decisions, int root) {
  std::vector<TrainingStart> out{{root, kGoal}};
  for (const auto& c : root_decisions.candidates)
    if (!c.is_goal()) out.push_back({c.stop_vertex, c.obstacle});
  return out;
}

bool ConvergenceMonitor::record(const std::vector<double>& before, const std::vector<double>& after,
                                const std::vector<int>& visits, std::vector<double>& log) {
  double change = 0.0;
  bool visited_enough = true;
  for (std::size_t k = 0; k < tracked_.size(); ++k) {
    double a = before[k], b = after[k];
    double d = (std::isfinite(a) && std::isfinite(b)) ? std::abs(b - a) : (a == b ? 0.0 : kInf);
    change = std::max(change, d);
    if (visits[k] < min_visits_) visited_enough = false;
  }
  log.push_back(change);
  calm_ = change < eta_ ? calm_ + 1 : 0;
  return visited_enough && calm_ >= window_;
}

TrainedValues opi_train(const PlanningContext& ctx, const BeliefState& belief, int root,
                        const OpiConfig& config, Rng& rng) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();
  const LatticeWorld& world = *ctx.world;
  const auto labels = belief.labels();
  TrainedValues out{ValueTable(world.goal(), optimistic_fallback(ctx, labels)), {}};
  if (root == world.goal()) {
    out.log.converged = true;
    return out;
  }

  DecisionCache cache;
  const DecisionSet root_ds = identify_decisions(world, labels, root);
  const auto starts = training_starts(root_ds, root);
  std::vector<int> tracked;
  for (const auto& s : starts)
    if (std::find(tracked.begin(), tracked.end(), s.vertex) == tracked.end()) tracked.push_back(s.vertex);
  ConvergenceMonitor monitor(tracked, config.eta, config.window, config.min_visits);

  const int cap = config.truncation_factor * (world.width() + world.height());
  EvalOptions opts{config.gamma_scale, config.use_bonus};
  auto value = [&](int v) { return out.table.value(v); };
  Chooser choose = [&](const std::vector<CandidateEval>& evals, int step, Rng& r) {
    return improve_policy(evals, config.exploration, config, step, r);
  };

  std::vector<double> before(tracked.size()), after(tracked.size());
  std::vector<int> visits(tracked.size());
  for (int it = 0; it < config.max_iterations; ++it) {
    for (std::size_t k = 0; k < tracked.size(); ++k) before[k] = out.table.value(tracked[k]);
    Statuses truth = belief.sample_environment(rng);
    const auto& s0 = starts[std::min<std::size_t>(starts.size() - 1,
                                                  static_cast<std::size_t>(uniform01(rng) * starts.size()))];
    auto sim_labels = labels;
    if (s0.obstacle != kGoal) reveal(sim_labels, s0.obstacle, truth);
    Trajectory traj = simulate(ctx, cache, belief.covariance(), std::move(sim_labels), s0.vertex,
                               truth, value, choose, opts, cap, rng);
    out.log.iterations = it + 1;
    if (traj.truncated) {
      ++out.log.truncated;
    } else {
      mc_update(out.table, traj);
    }
    for (std::size_t k = 0; k < tracked.size(); ++k) {
      after[k] = out.table.value(tracked[k]);
      visits[k] = out.table.visits(tracked[k]);
    }
    if (monitor.record(before, after, visits, out.log.max_change)) {
      out.log.converged = true;
      break;
    }
  }
  out.log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace scos
