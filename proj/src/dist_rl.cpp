#include "scos/dist_rl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "scos/errors.hpp"

namespace scos {

namespace {
bool same_atom(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }
}  // namespace

ValueDistribution ValueDistribution::uniform(double lower, double upper, double delta) {
  if (!(delta > 0)) throw Error(ErrorCode::kDomain, "support spacing must be > 0");
  if (!(lower <= upper)) throw Error(ErrorCode::kDomain, "support lower bound exceeds upper");
  ValueDistribution d;
  d.delta_ = delta;
  const int k = static_cast<int>(std::floor((upper - lower) / delta + 1e-9)) + 1;
  for (int i = 0; i < k; ++i) d.support_.push_back(lower + i * delta);
  // Close the grid exactly on the upper bound when it is not a multiple of delta.
  if (upper - d.support_.back() > 1e-9) d.support_.push_back(upper);
  d.alpha_.assign(d.support_.size(), 1.0);
  d.observed_.assign(d.support_.size(), 0);
  return d;
}

ValueDistribution ValueDistribution::point_mass(double x, double delta) {
  ValueDistribution d;
  d.delta_ = delta;
  d.support_ = {x};
  d.alpha_ = {1.0};
  d.observed_ = {1};
  return d;
}

double ValueDistribution::total() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0); }

double ValueDistribution::mean() const {
  double s = 0.0, a = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    s += alpha_[i] * support_[i];
    a += alpha_[i];
  }
  return s / a;
}

double ValueDistribution::sample_mean(Rng& rng) const {
  if (support_.size() == 1) return support_[0];
  double s = 0.0, g = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    double w = gamma_variate(alpha_[i], rng);
    s += w * support_[i];
    g += w;
  }
  return g > 0 ? s / g : mean();
}

void ValueDistribution::bellman_project(const ValueDistribution& next, double shift) {
  const double total_next = next.total();
  for (std::size_t i = 0; i < next.size(); ++i) {
    const double p = next.alpha_[i] / total_next;
    const double t = next.support_[i] + shift;
    if (t <= support_.front()) {
      alpha_.front() += p;
    } else if (t >= support_.back()) {
      alpha_.back() += p;
    } else {
      auto it = std::upper_bound(support_.begin(), support_.end(), t);
      std::size_t j = static_cast<std::size_t>(it - support_.begin()) - 1;
      const double span = support_[j + 1] - support_[j];
      const double wj = (support_[j + 1] - t) / span;
      alpha_[j] += wj * p;
      alpha_[j + 1] += (1.0 - wj) * p;
    }
  }
}

ValueDistribution::Refinement ValueDistribution::refine(double c) {
  auto it = std::lower_bound(support_.begin(), support_.end(), c);
  std::size_t pos = static_cast<std::size_t>(it - support_.begin());
  for (std::size_t j : {pos, pos == 0 ? pos : pos - 1}) {
    if (j < support_.size() && same_atom(support_[j], c)) {
      alpha_[j] += 1.0;
      observed_[j] = 1;
      return Refinement::kIncrement;
    }
  }
  // Strictly bracketed: support_[pos-1] < c < support_[pos].
  if (pos > 0 && pos < support_.size()) {
    std::size_t j = pos - 1;
    bool replaceable = !observed_[j] && !observed_[j + 1];
    bool close = c - support_[j] <= delta_ && support_[j + 1] - c <= delta_;
    if (replaceable && close) {
      double a = alpha_[j] + alpha_[j + 1] + 1.0;
      support_[j] = c;
      alpha_[j] = a;
      observed_[j] = 1;
      support_.erase(support_.begin() + static_cast<long>(j + 1));
      alpha_.erase(alpha_.begin() + static_cast<long>(j + 1));
      observed_.erase(observed_.begin() + static_cast<long>(j + 1));
      return Refinement::kMerge;
    }
  }
  support_.insert(support_.begin() + static_cast<long>(pos), c);
  alpha_.insert(alpha_.begin() + static_cast<long>(pos), 1.0);
  observed_.insert(observed_.begin() + static_cast<long>(pos), 1);
  return Refinement::kInsert;
}

double refinement_bound(double c, double mean_before, double total_before, double merged_alpha,
                        double delta) {
  return (std::abs(c - mean_before) + merged_alpha * delta) / (total_before + 1.0);
}

nlohmann::json ValueDistribution::to_json() const {
  std::vector<int> obs(observed_.begin(), observed_.end());
  return {{"support", support_}, {"alpha", alpha_}, {"observed", obs}, {"delta", delta_}};
}

ValueDistribution ValueDistribution::from_json(const nlohmann::json& j) {
  ValueDistribution d;
  d.support_ = j.at("support").get<std::vector<double>>();
  d.alpha_ = j.at("alpha").get<std::vector<double>>();
  auto obs = j.at("observed").get<std::vector<int>>();
  d.observed_.assign(obs.begin(), obs.end());
  d.delta_ = j.at("delta").get<double>();
  return d;
}

void DrlConfig::validate() const {
  opi.validate();
  if (!(delta > 0)) throw Error(ErrorCode::kConfig, "delta must be > 0");
}

ValueDistribution DistributionTable::initial(int v) const {
  if (v == goal_) return ValueDistribution::point_mass(0.0, delta_);
  double lo = (*lower_)[v], hi = (*upper_)[v];
  if (!std::isfinite(lo)) return ValueDistribution::point_mass(1e6, delta_);
  return ValueDistribution::uniform(lo, std::max(lo, hi), delta_);
}

ValueDistribution& DistributionTable::at(int v) {
  auto it = entries_.find(v);
  if (it == entries_.end()) it = entries_.emplace(v, initial(v)).first;
  return it->second;
}

const ValueDistribution* DistributionTable::find(int v) const {
  auto it = entries_.find(v);
  return it == entries_.end() ? nullptr : &it->second;
}

double DistributionTable::mean(int v) const {
  if (v == goal_) return 0.0;
  if (auto* d = find(v)) return d->mean();
  return initial(v).mean();
}

double DistributionTable::sample_mean(int v, Rng& rng) const {
  if (v == goal_) return 0.0;
  if (auto* d = find(v)) return d->sample_mean(rng);
  return initial(v).sample_mean(rng);
}

nlohmann::json DistributionTable::to_json() const {
  nlohmann::json j;
  j["goal"] = goal_;
  j["delta"] = delta_;
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& [v, d] : entries_) arr.push_back({{"vertex", v}, {"distribution", d.to_json()}});
  return j;
}

DistributionTable DistributionTable::from_json(const nlohmann::json& j,
                                               std::shared_ptr<const std::vector<double>> lower,
                                               std::shared_ptr<const std::vector<double>> upper) {
  DistributionTable t(j.at("goal").get<int>(), j.at("delta").get<double>(), std::move(lower),
                      std::move(upper));
  for (const auto& e : j.at("entries"))
    t.entries_[e.at("vertex").get<int>()] = ValueDistribution::from_json(e.at("distribution"));
  return t;
}

std::pair<std::shared_ptr<const std::vector<double>>, std::shared_ptr<const std::vector<double>>>
support_bounds(const PlanningContext& ctx, const std::vector<Label>& labels) {
  const LatticeWorld& world = *ctx.world;
  auto lower = cost_to_go(world, labels, Charges{ctx.charges}, world.goal());
  auto blocked = labels;
  for (auto& l : blocked)
    if (l == Label::kAmbiguousFree) l = Label::kAmbiguousBlocking;
  auto upper = cost_to_go(world, blocked, {}, world.goal());
  const double slack = 2.0 * (world.width() + world.height());
  for (int v = 0; v < world.vertex_count(); ++v) {
    if (!std::isfinite(upper[v])) {
      upper[v] = lower[v] + slack;
      continue;
    }
    for (int id : ctx.in_range[v])
      if (labels[id] == Label::kAmbiguousFree) upper[v] += world.obstacle(id).disambiguation_cost;
  }
  return {std::make_shared<const std::vector<double>>(std::move(lower)),
          std::make_shared<const std::vector<double>>(std::move(upper))};
}

void drl_update(DistributionTable& table, const Trajectory& trajectory) {
  const auto& st = trajectory.steps;
  for (const auto& s : st) {
    if (s.state == table.goal()) continue;
    // Copy first: state and successor may coincide.
    ValueDistribution next = s.next == table.goal() ? ValueDistribution::point_mass(0.0)
                                                    : table.at(s.next);
    table.at(s.state).bellman_project(next, s.cost - s.bonus);
  }
  std::vector<double> tail(st.size() + 1, 0.0);
  for (std::size_t k = st.size(); k-- > 0;) tail[k] = tail[k + 1] + st[k].cost - st[k].bonus;
  std::set<int> seen;
  for (std::size_t k = 0; k < st.size(); ++k)
    if (st[k].state != table.goal() && seen.insert(st[k].state).second)
      table.at(st[k].state).refine(tail[k]);
}

TrainedDistributions drl_train(const PlanningContext& ctx, const BeliefState& belief, int root,
                               const DrlConfig& config, Rng& rng) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();
  const LatticeWorld& world = *ctx.world;
  const auto labels = belief.labels();
  auto [lower, upper] = support_bounds(ctx, labels);
  TrainedDistributions out{DistributionTable(world.goal(), config.delta, lower, upper), {}};
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
  ConvergenceMonitor monitor(tracked, config.opi.eta, config.opi.window, config.opi.min_visits);
  std::map<int, int> visit_count;

  const int cap = config.opi.truncation_factor * (world.width() + world.height());
  EvalOptions opts{config.opi.gamma_scale, config.opi.use_bonus};
  auto value = [&](int v) {
    return config.thompson ? out.table.sample_mean(v, rng) : out.table.mean(v);
  };
  Chooser choose = [&](const std::vector<CandidateEval>& evals, int, Rng&) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(evals.size()); ++k)
      if (evals[k].q() < evals[best].q()) best = k;
    return best;
  };

  std::vector<double> before(tracked.size()), after(tracked.size());
  std::vector<int> visits(tracked.size());
  for (int it = 0; it < config.opi.max_iterations; ++it) {
    for (std::size_t k = 0; k < tracked.size(); ++k) before[k] = out.table.mean(tracked[k]);
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
      drl_update(out.table, traj);
      std::set<int> seen;
      for (const auto& s : traj.steps)
        if (seen.insert(s.state).second) ++visit_count[s.state];
    }
    for (std::size_t k = 0; k < tracked.size(); ++k) {
      after[k] = out.table.mean(tracked[k]);
      visits[k] = visit_count[tracked[k]];
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
