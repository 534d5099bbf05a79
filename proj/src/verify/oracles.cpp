#include "oracles.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>

#include "scos/errors.hpp"

namespace scos::oracle {

Posterior precision_form(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& noise, double big) {
  const auto n = K.rows();
  Eigen::VectorXd s = noise.unaryExpr([big](double v) { return std::isfinite(v) ? v : big; });
  Eigen::MatrixXd Sinv = s.cwiseInverse().asDiagonal();
  Eigen::MatrixXd Kinv = K.inverse();
  Eigen::MatrixXd cov = (Kinv + Sinv).inverse();
  Eigen::VectorXd yy = y;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(noise[i])) yy[i] = 0.0;
  return {cov * (Sinv * yy), cov};
}

double llr_variance_closed_form(double lambda) {
  using boost::math::digamma;
  using boost::math::trigamma;
  const double a = 4 + lambda, b = 4 - lambda;
  const double m = digamma(a) - digamma(b);
  return 4 * lambda * lambda * (trigamma(a) + trigamma(b) + m * m);
}

std::vector<double> bellman_ford_to(const LatticeWorld& world, std::span<const Label> labels,
                                    Charges charges, int target) {
  std::vector<double> d(world.vertex_count(), kInf);
  d[target] = 0.0;
  for (int round = 0; round < world.vertex_count(); ++round) {
    bool changed = false;
    for (int u = 0; u < world.vertex_count(); ++u) {
      for (int dir = 0; dir < LatticeWorld::kDirections; ++dir) {
        int v = world.neighbor(u, dir);
        if (v < 0 || d[v] == kInf) continue;
        double w = edge_weight(world, labels, charges, u, dir);
        if (d[v] + w < d[u] - 1e-12) {
          d[u] = d[v] + w;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return d;
}

namespace {

double octile(const LatticeWorld& world, int a, int b) {
  Vertex p = world.vertex(a), q = world.vertex(b);
  double dx = std::abs(p.i - q.i), dy = std::abs(p.j - q.j);
  return std::max(dx, dy) - std::min(dx, dy) + std::sqrt(2.0) * std::min(dx, dy);
}

}  // namespace

Enumerated enumerate_paths(const LatticeWorld& world, int from, int to,
                           const std::function<bool(int, int)>& edge_ok,
                           const std::function<double(const std::vector<int>&)>& cost, double tol) {
  Enumerated best;
  std::vector<int> path{from};
  std::vector<char> on(world.vertex_count(), 0);
  on[from] = 1;
  std::function<void()> dfs = [&] {
    int v = path.back();
    double c = cost(path);
    if (c == kInf) return;
    if (c + octile(world, v, to) > best.cost + tol) return;
    if (v == to) {
      if (c < best.cost - tol) {
        best.cost = c;
        best.path = path;
      } else if (c <= best.cost + tol && path < best.path) {
        best.cost = std::min(best.cost, c);
        best.path = path;
      }
      return;
    }
    for (int dir = 0; dir < LatticeWorld::kDirections; ++dir) {
      int u = world.neighbor(v, dir);
      if (u < 0 || on[u] || !edge_ok(v, u)) continue;
      on[u] = 1;
      path.push_back(u);
      dfs();
      path.pop_back();
      on[u] = 0;
    }
  };
  dfs();
  return best;
}

StatusPmf StatusPmf::independent(const std::vector<double>& rho, const std::vector<int>& ambiguous,
                                 const Statuses& base) {
  StatusPmf pmf;
  const int m = static_cast<int>(ambiguous.size());
  for (int mask = 0; mask < (1 << m); ++mask) {
    Statuses z = base;
    double p = 1.0;
    for (int k = 0; k < m; ++k) {
      bool blocked = (mask >> k) & 1;
      z[ambiguous[k]] = blocked;
      p *= blocked ? rho[ambiguous[k]] : 1.0 - rho[ambiguous[k]];
    }
    pmf.outcomes.push_back(std::move(z));
    pmf.prob.push_back(p);
  }
  return pmf;
}

StatusPmf StatusPmf::empirical(const BeliefState& belief, int draws, Rng& rng) {
  std::map<Statuses, int> counts;
  for (int k = 0; k < draws; ++k) ++counts[belief.sample_environment(rng)];
  StatusPmf pmf;
  for (auto& [z, c] : counts) {
    pmf.outcomes.push_back(z);
    pmf.prob.push_back(static_cast<double>(c) / draws);
  }
  return pmf;
}

Expectimax::Expectimax(const LatticeWorld& world, std::vector<Label> root_labels, StatusPmf pmf,
                       ExpectimaxOptions options)
    : world_(world), root_(std::move(root_labels)), root_unpruned_(root_), pmf_(std::move(pmf)),
      opt_(std::move(options)) {
  for (int id : opt_.forced_blocked) root_[id] = Label::kBlocked;
}

double Expectimax::probability_blocked(const std::vector<Label>& labels, int obstacle) const {
  double num = 0.0, den = 0.0;
  std::vector<char> forced(labels.size(), 0);
  for (int id : opt_.forced_blocked) forced[id] = 1;
  for (std::size_t k = 0; k < pmf_.outcomes.size(); ++k) {
    const Statuses& z = pmf_.outcomes[k];
    bool ok = true;
    for (std::size_t i = 0; i < labels.size() && ok; ++i) {
      if (forced[i]) continue;
      if (labels[i] == Label::kBlocked && !z[i]) ok = false;
      if (labels[i] == Label::kFree && z[i]) ok = false;
    }
    if (!ok) continue;
    den += pmf_.prob[k];
    if (z[obstacle]) num += pmf_.prob[k];
  }
  if (den <= 0) throw Error(ErrorCode::kInvariant, "labels inconsistent with every outcome");
  return num / den;
}

Expectimax::Value Expectimax::solve(int v, const std::vector<Label>& labels, double ledger,
                                    int depth) {
  if (v == world_.goal()) return {};
  auto key = std::make_tuple(v, labels, ledger);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  DecisionSet ds = identify_decisions(
      world_, depth == 0 && opt_.discard_below_root ? root_unpruned_ : labels, v);
  std::vector<Value> vals;
  std::vector<double> q;
  for (const Candidate& c : ds.candidates) {
    double cost = c.length + (c.is_goal() ? 0.0 : world_.obstacle(c.obstacle).disambiguation_cost);
    auto [g, mi] = opt_.bonus ? opt_.bonus(v, labels, c, ledger) : std::pair<double, double>{0.0, 0.0};
    Value val{cost - g, cost, g};
    if (!c.is_goal()) {
      double p = probability_blocked(labels, c.obstacle);
      for (int blocked = 0; blocked < 2; ++blocked) {
        double w = blocked ? p : 1.0 - p;
        if (w <= 0.0) continue;
        auto next = labels;
        next[c.obstacle] = blocked ? Label::kBlocked : Label::kFree;
        Value f = solve(c.stop_vertex, next, ledger + mi, depth + 1);
        val.shaped += w * f.shaped;
        val.raw += w * f.raw;
        val.bonus += w * f.bonus;
      }
    }
    vals.push_back(val);
    q.push_back(val.shaped);
  }
  int pick = 0;
  if (opt_.fixed) {
    pick = opt_.fixed(v, labels, q);
  } else {
    for (int k = 1; k < static_cast<int>(q.size()); ++k)
      if (q[k] < q[pick]) pick = k;
  }
  if (depth == 0) root_choice_ = pick;
  choices_[key] = pick;
  memo_[key] = vals[pick];
  return vals[pick];
}

Expectimax::Value Expectimax::evaluate(int vertex) { return solve(vertex, root_, 0.0, 0); }

double Expectimax::value(int vertex) { return evaluate(vertex).shaped; }

int Expectimax::best_first_candidate(int vertex) {
  memo_.clear();
  choices_.clear();
  solve(vertex, root_, 0.0, 0);
  return root_choice_;
}

int Expectimax::choice(int vertex, const std::vector<Label>& labels, double ledger) {
  if (vertex == world_.goal()) return -1;
  solve(vertex, labels, ledger, 1);
  return choices_.at(std::make_tuple(vertex, labels, ledger));
}

}  // namespace scos::oracle
