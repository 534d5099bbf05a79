#include "scos/grid_world.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

#include "scos/errors.hpp"

namespace scos {

namespace {

constexpr std::array<std::array<int, 2>, 8> kSteps = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

// Tolerance used when matching edge weights against cost-to-go during path
// extraction. Costs are sums of at most a few thousand terms of order 1.
bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

using Entry = std::pair<double, int>;
using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double point_segment_distance(Point p, Point a, Point b) {
  double dx = b.x - a.x, dy = b.y - a.y;
  double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

bool segment_intersects_disk(Point a, Point b, Point center, double radius) {
  return point_segment_distance(center, a, b) <= radius;
}

double segment_entry_parameter(Point a, Point b, Point center, double radius) {
  if (distance(a, center) <= radius) return 0.0;
  // Solve |a + t d - c|^2 = r^2 for the smaller root.
  double dx = b.x - a.x, dy = b.y - a.y;
  double fx = a.x - center.x, fy = a.y - center.y;
  double qa = dx * dx + dy * dy;
  double qb = 2 * (fx * dx + fy * dy);
  double qc = fx * fx + fy * fy - radius * radius;
  double disc = qb * qb - 4 * qa * qc;
  if (disc < 0) return segment_intersects_disk(a, b, center, radius) ? 0.5 : kInf;
  double t = (-qb - std::sqrt(disc)) / (2 * qa);
  if (t < 0 || t > 1) return segment_intersects_disk(a, b, center, radius) ? std::clamp(t, 0.0, 1.0) : kInf;
  return t;
}

bool edge_blocked(Vertex a, Vertex b, const Obstacle& obstacle) {
  return segment_intersects_disk({double(a.i), double(a.j)}, {double(b.i), double(b.j)},
                                 obstacle.center, obstacle.radius);
}

double LatticeWorld::step_length(int dir) {
  return (kSteps[dir][0] != 0 && kSteps[dir][1] != 0) ? std::sqrt(2.0) : 1.0;
}

LatticeWorld::LatticeWorld(int width, int height, std::vector<Obstacle> obstacles)
    : LatticeWorld(width, height, std::move(obstacles), Vertex{width / 2, height},
                   Vertex{width / 2, 1}) {}

LatticeWorld::LatticeWorld(int width, int height, std::vector<Obstacle> obstacles, Vertex start,
                           Vertex goal)
    : width_(width), height_(height), obstacles_(std::move(obstacles)) {
  if (width < 1 || height < 1) throw Error(ErrorCode::kConfig, "grid must be at least 1x1");
  if (!contains(start) || !contains(goal))
    throw Error(ErrorCode::kConfig, "start or goal outside the lattice");
  for (std::size_t k = 0; k < obstacles_.size(); ++k) {
    obstacles_[k].id = static_cast<int>(k);
    if (!(obstacles_[k].radius > 0)) throw Error(ErrorCode::kConfig, "obstacle radius must be > 0");
    if (obstacles_[k].disambiguation_cost < 0)
      throw Error(ErrorCode::kConfig, "disambiguation cost must be >= 0");
  }
  start_ = index(start);
  goal_ = index(goal);
  build();
}

void LatticeWorld::build() {
  const int n = vertex_count();
  neighbors_.assign(static_cast<std::size_t>(n) * kDirections, -1);
  for (int v = 0; v < n; ++v) {
    Vertex p = vertex(v);
    for (int d = 0; d < kDirections; ++d) {
      Vertex q{p.i + kSteps[d][0], p.j + kSteps[d][1]};
      if (contains(q)) neighbors_[v * kDirections + d] = index(q);
    }
  }

  std::vector<std::vector<Contact>> per_edge(static_cast<std::size_t>(n) * kDirections);
  interior_.assign(obstacles_.size(), {});
  for (const auto& ob : obstacles_) {
    int i_lo = std::max(1, static_cast<int>(std::floor(ob.center.x - ob.radius)) - 1);
    int i_hi = std::min(width_, static_cast<int>(std::ceil(ob.center.x + ob.radius)) + 1);
    int j_lo = std::max(1, static_cast<int>(std::floor(ob.center.y - ob.radius)) - 1);
    int j_hi = std::min(height_, static_cast<int>(std::ceil(ob.center.y + ob.radius)) + 1);
    for (int i = i_lo; i <= i_hi; ++i) {
      for (int j = j_lo; j <= j_hi; ++j) {
        int v = index({i, j});
        Point pv = point(v);
        bool inside = distance(pv, ob.center) <= ob.radius;
        if (inside) interior_[ob.id].push_back(v);
        for (int d = 0; d < kDirections; ++d) {
          int u = neighbors_[v * kDirections + d];
          if (u < 0) continue;
          if (segment_intersects_disk(pv, point(u), ob.center, ob.radius))
            per_edge[v * kDirections + d].push_back({ob.id, !inside});
        }
      }
    }
  }
  offsets_.assign(per_edge.size() + 1, 0);
  for (std::size_t e = 0; e < per_edge.size(); ++e)
    offsets_[e + 1] = offsets_[e] + static_cast<int>(per_edge[e].size());
  contacts_.clear();
  contacts_.reserve(offsets_.back());
  for (auto& list : per_edge) contacts_.insert(contacts_.end(), list.begin(), list.end());
}

std::vector<int> LatticeWorld::obstacles_within(int v, double range) const {
  std::vector<int> out;
  Point p = point(v);
  for (const auto& ob : obstacles_)
    if (distance(p, ob.center) <= range) out.push_back(ob.id);
  return out;
}

std::vector<double> disambiguation_charges(const LatticeWorld& world) {
  std::vector<double> c(world.obstacle_count());
  for (const auto& ob : world.obstacles()) c[ob.id] = ob.disambiguation_cost;
  return c;
}

double edge_weight(const LatticeWorld& world, std::span<const Label> labels, Charges charges,
                   int v, int dir) {
  if (world.neighbor(v, dir) < 0) return kInf;
  double w = LatticeWorld::step_length(dir);
  for (const Contact& c : world.contacts(v, dir)) {
    Label l = labels[c.obstacle];
    if (l == Label::kBlocked || l == Label::kAmbiguousBlocking) return kInf;
    if (l == Label::kAmbiguousFree && c.entry && !charges.empty()) w += charges[c.obstacle];
  }
  return w;
}

std::vector<double> cost_to_go(const LatticeWorld& world, std::span<const Label> labels,
                               Charges charges, int target, int stop_at) {
  std::vector<double> dist(world.vertex_count(), kInf);
  std::vector<char> done(world.vertex_count(), 0);
  MinHeap heap;
  dist[target] = 0.0;
  heap.push({0.0, target});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    if (v == stop_at) break;
    for (int dir = 0; dir < LatticeWorld::kDirections; ++dir) {
      int u = world.neighbor(v, dir);
      if (u < 0 || done[u]) continue;
      double w = edge_weight(world, labels, charges, u, LatticeWorld::opposite(dir));
      if (w == kInf) continue;
      if (d + w < dist[u]) {
        dist[u] = d + w;
        heap.push({dist[u], u});
      }
    }
  }
  return dist;
}

std::vector<double> cost_from(const LatticeWorld& world, std::span<const Label> labels,
                              Charges charges, int source) {
  std::vector<double> dist(world.vertex_count(), kInf);
  std::vector<char> done(world.vertex_count(), 0);
  MinHeap heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (int dir = 0; dir < LatticeWorld::kDirections; ++dir) {
      int u = world.neighbor(v, dir);
      if (u < 0 || done[u]) continue;
      double w = edge_weight(world, labels, charges, v, dir);
      if (w == kInf) continue;
      if (d + w < dist[u]) {
        dist[u] = d + w;
        heap.push({dist[u], u});
      }
    }
  }
  return dist;
}

PathResult extract_path(const LatticeWorld& world, std::span<const Label> labels, Charges charges,
                        const std::vector<double>& to_go, int from, int target) {
  PathResult out;
  if (to_go[from] == kInf) return out;
  out.cost = to_go[from];
  out.vertices.push_back(from);
  int v = from;
  while (v != target) {
    int best = -1;
    for (int dir = 0; dir < LatticeWorld::kDirections; ++dir) {
      int u = world.neighbor(v, dir);
      if (u < 0 || to_go[u] == kInf) continue;
      double w = edge_weight(world, labels, charges, v, dir);
      if (w == kInf || !near(w + to_go[u], to_go[v])) continue;
      // Only follow strictly decreasing cost-to-go; every edge is >= 1 long.
      if (to_go[u] >= to_go[v]) continue;
      if (best < 0 || u < best) best = u;
    }
    if (best < 0) throw Error(ErrorCode::kNumerical, "path extraction lost the cost-to-go trail");
    out.vertices.push_back(best);
    v = best;
  }
  out.length = path_length(world, out.vertices);
  return out;
}

PathResult shortest_path(const LatticeWorld& world, std::span<const Label> labels, int from,
                         int to, Charges charges) {
  auto to_go = cost_to_go(world, labels, charges, to, from);
  return extract_path(world, labels, charges, to_go, from, to);
}

PathResult shortest_path(const LatticeWorld& world, std::span<const Label> labels, int from,
                         int to, bool include_disamb_costs) {
  if (!include_disamb_costs) return shortest_path(world, labels, from, to, Charges{});
  auto charges = disambiguation_charges(world);
  return shortest_path(world, labels, from, to, Charges{charges});
}

int direction_between(const LatticeWorld& world, int from, int to) {
  for (int dir = 0; dir < LatticeWorld::kDirections; ++dir)
    if (world.neighbor(from, dir) == to) return dir;
  return -1;
}

double path_length(const LatticeWorld& world, std::span<const int> path) {
  double len = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    int dir = direction_between(world, path[k - 1], path[k]);
    if (dir < 0) throw Error(ErrorCode::kInvariant, "path contains a non-adjacent step");
    len += LatticeWorld::step_length(dir);
  }
  return len;
}

double path_cost(const LatticeWorld& world, std::span<const Label> labels, Charges charges,
                 std::span<const int> path) {
  double cost = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    int dir = direction_between(world, path[k - 1], path[k]);
    if (dir < 0) return kInf;
    cost += edge_weight(world, labels, charges, path[k - 1], dir);
  }
  return cost;
}

}  // namespace scos
