#include "scos/macro_planner.hpp"

#include <algorithm>

#include "scos/errors.hpp"

namespace scos {

namespace {

std::vector<Label> exploit_labels(std::span<const Label> labels) {
  std::vector<Label> out(labels.begin(), labels.end());
  for (auto& l : out)
    if (l == Label::kAmbiguousFree) l = Label::kAmbiguousBlocking;
  return out;
}

// First edge of the path that touches an AMBIGUOUS_FREE obstacle; returns the
// edge's tail position and the obstacle met earliest along that edge.
std::pair<int, int> first_ambiguous_contact(const LatticeWorld& world,
                                            std::span<const Label> labels,
                                            const std::vector<int>& path) {
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    int dir = direction_between(world, path[k], path[k + 1]);
    int best = -1;
    double best_t = kInf;
    for (const Contact& c : world.contacts(path[k], dir)) {
      if (labels[c.obstacle] != Label::kAmbiguousFree) continue;
      const Obstacle& ob = world.obstacle(c.obstacle);
      double t = segment_entry_parameter(world.point(path[k]), world.point(path[k + 1]), ob.center,
                                         ob.radius);
      if (t < best_t || (t == best_t && c.obstacle < best)) {
        best_t = t;
        best = c.obstacle;
      }
    }
    if (best >= 0) return {static_cast<int>(k), best};
  }
  return {-1, -1};
}

}  // namespace

DecisionSet identify_decisions(const LatticeWorld& world, std::span<const Label> labels, int from,
                               bool with_bounds) {
  DecisionSet out;
  const auto charges = disambiguation_charges(world);
  const Charges ch{charges};
  const auto free_labels = exploit_labels(labels);
  const auto free_from = cost_from(world, free_labels, {}, from);
  out.exploit_cost = free_from[world.goal()];

  std::vector<Label> work(labels.begin(), labels.end());
  const int rounds = 1 + static_cast<int>(std::count(labels.begin(), labels.end(), Label::kAmbiguousFree));
  for (int round = 0; round < rounds; ++round) {
    PathResult p = shortest_path(world, work, from, world.goal(), ch);
    if (!p.reachable()) break;
    auto [k, x] = first_ambiguous_contact(world, work, p.vertices);
    if (x < 0) {
      Candidate c;
      c.stop_vertex = world.goal();
      c.segment = std::move(p.vertices);
      c.length = p.length;
      c.bound = c.length;
      out.candidates.push_back(std::move(c));
      break;
    }
    Candidate c;
    c.stop_vertex = p.vertices[k];
    c.obstacle = x;
    // The optimistic prefix is itself obstacle-free, so a shortest obstacle-free
    // segment to the same vertex always exists.
    PathResult seg = shortest_path(world, free_labels, from, c.stop_vertex, Charges{});
    if (!seg.reachable()) throw Error(ErrorCode::kInvariant, "optimistic prefix is not obstacle-free");
    c.segment = std::move(seg.vertices);
    c.length = seg.length;
    if (with_bounds) {
      std::vector<Label> opt(labels.begin(), labels.end());
      opt[x] = Label::kFree;
      auto to_go = cost_to_go(world, opt, ch, world.goal(), c.stop_vertex);
      c.bound = c.length + world.obstacle(x).disambiguation_cost + to_go[c.stop_vertex];
    }
    out.candidates.push_back(std::move(c));
    work[x] = Label::kAmbiguousBlocking;
  }
  if (out.candidates.empty())
    throw Error(ErrorCode::kNoCandidates, "goal unreachable under every assumption");
  return out;
}

DecisionSet identify_decisions(const LatticeWorld& world, const BeliefState& belief, int from,
                               bool with_bounds) {
  auto labels = belief.labels();
  return identify_decisions(world, labels, from, with_bounds);
}

namespace {

double bound_with(const LatticeWorld& world, std::span<const Label> labels, int obstacle, int from,
                  const std::vector<double>& optimistic_to_go) {
  const auto& inner = world.interior(obstacle);
  if (inner.empty()) throw Error(ErrorCode::kNoInterior, "obstacle has no interior vertex");
  // C1 avoids every ambiguous obstacle except the one being entered; with it
  // blocked too, no path could reach its interior at all.
  auto free_labels = exploit_labels(labels);
  free_labels[obstacle] = Label::kFree;
  auto reach = cost_from(world, free_labels, {}, from);
  double c1 = kInf, c2 = kInf;
  for (int v : inner) {
    c1 = std::min(c1, reach[v]);
    c2 = std::min(c2, optimistic_to_go[v]);
  }
  return c1 + c2;
}

}  // namespace

double pseudo_vertex_bound(const LatticeWorld& world, std::span<const Label> labels, int obstacle,
                           int from, int goal) {
  const auto charges = disambiguation_charges(world);
  auto to_go = cost_to_go(world, labels, Charges{charges}, goal);
  return bound_with(world, labels, obstacle, from, to_go);
}

std::vector<int> prune_search_space(const LatticeWorld& world, std::span<const Label> labels,
                                    int from, const DecisionSet& decisions) {
  std::vector<int> out;
  const double cap = decisions.exploit_cost;
  if (cap == kInf) return out;
  std::vector<char> is_candidate(world.obstacle_count(), 0);
  for (const auto& c : decisions.candidates)
    if (!c.is_goal()) is_candidate[c.obstacle] = 1;
  const auto charges = disambiguation_charges(world);
  std::vector<double> to_go;
  for (int x = 0; x < world.obstacle_count(); ++x) {
    if (labels[x] != Label::kAmbiguousFree || is_candidate[x]) continue;
    if (world.interior(x).empty()) continue;
    if (to_go.empty()) to_go = cost_to_go(world, labels, Charges{charges}, world.goal());
    if (bound_with(world, labels, x, from, to_go) >= cap) out.push_back(x);
  }
  return out;
}

}  // namespace scos
