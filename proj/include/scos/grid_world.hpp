#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace scos {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Vertex {
  int i = 1;
  int j = 1;
  auto operator<=>(const Vertex&) const = default;
};

struct Obstacle {
  int id = 0;
  Point center;
  double radius = 1.0;
  double disambiguation_cost = 1.0;
};

enum class Label : std::uint8_t { kFree, kBlocked, kAmbiguousBlocking, kAmbiguousFree };

double distance(Point a, Point b);
double point_segment_distance(Point p, Point a, Point b);
// Closed test: touching the boundary counts.
bool segment_intersects_disk(Point a, Point b, Point center, double radius);
// Smallest t in [0,1] with a + t(b-a) inside the closed disk, or +inf.
double segment_entry_parameter(Point a, Point b, Point center, double radius);
bool edge_blocked(Vertex a, Vertex b, const Obstacle& obstacle);

// One obstacle touched by a directed edge. `entry` is set when the tail lies
// strictly outside the disk, i.e. the step moves the path into the obstacle.
struct Contact {
  int obstacle;
  bool entry;
};

struct PathResult {
  std::vector<int> vertices;
  double cost = kInf;
  double length = kInf;
  bool reachable() const { return cost < kInf; }
};

class LatticeWorld {
 public:
  static constexpr int kDirections = 8;

  LatticeWorld(int width, int height, std::vector<Obstacle> obstacles);
  LatticeWorld(int width, int height, std::vector<Obstacle> obstacles, Vertex start, Vertex goal);

  int width() const { return width_; }
  int height() const { return height_; }
  int vertex_count() const { return width_ * height_; }
  int obstacle_count() const { return static_cast<int>(obstacles_.size()); }

  // Index order is lexicographic in (i, j), so comparing indices compares vertices.
  int index(Vertex v) const { return (v.i - 1) * height_ + (v.j - 1); }
  Vertex vertex(int idx) const { return {idx / height_ + 1, idx % height_ + 1}; }
  Point point(int idx) const {
    Vertex v = vertex(idx);
    return {static_cast<double>(v.i), static_cast<double>(v.j)};
  }
  bool contains(Vertex v) const { return v.i >= 1 && v.i <= width_ && v.j >= 1 && v.j <= height_; }

  int start() const { return start_; }
  int goal() const { return goal_; }

  int neighbor(int v, int dir) const { return neighbors_[v * kDirections + dir]; }
  static int opposite(int dir) { return kDirections - 1 - dir; }
  static double step_length(int dir);

  std::span<const Contact> contacts(int v, int dir) const {
    int e = v * kDirections + dir;
    return {contacts_.data() + offsets_[e], contacts_.data() + offsets_[e + 1]};
  }

  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  const Obstacle& obstacle(int id) const { return obstacles_[id]; }
  const std::vector<int>& interior(int obstacle) const { return interior_[obstacle]; }
  // Obstacles whose center is within `range` of the vertex, ascending id.
  std::vector<int> obstacles_within(int v, double range) const;

 private:
  void build();

  int width_;
  int height_;
  int start_;
  int goal_;
  std::vector<Obstacle> obstacles_;
  std::vector<int> neighbors_;
  std::vector<int> offsets_;
  std::vector<Contact> contacts_;
  std::vector<std::vector<int>> interior_;
};

// Per-obstacle surcharge paid on every entry edge into an AMBIGUOUS_FREE disk.
// An empty span means no surcharges.
using Charges = std::span<const double>;

std::vector<double> disambiguation_charges(const LatticeWorld& world);

// Weight of directed edge v -> neighbor(v, dir); +inf when blocked or off-grid.
double edge_weight(const LatticeWorld& world, std::span<const Label> labels, Charges charges,
                   int v, int dir);

// Cost-to-target for every vertex (reverse search). When stop_at >= 0 the
// search ends once that vertex settles; other entries may then be upper bounds.
std::vector<double> cost_to_go(const LatticeWorld& world, std::span<const Label> labels,
                               Charges charges, int target, int stop_at = -1);
// Cost-from-source for every vertex (forward search).
std::vector<double> cost_from(const LatticeWorld& world, std::span<const Label> labels,
                              Charges charges, int source);

// Lexicographically smallest minimum-cost path, walked greedily over exact
// cost-to-go values produced by cost_to_go for the same target.
PathResult extract_path(const LatticeWorld& world, std::span<const Label> labels, Charges charges,
                        const std::vector<double>& to_go, int from, int target);

PathResult shortest_path(const LatticeWorld& world, std::span<const Label> labels, int from,
                         int to, Charges charges);
PathResult shortest_path(const LatticeWorld& world, std::span<const Label> labels, int from,
                         int to, bool include_disamb_costs);

// Path length and charge total of a concrete vertex sequence under the given
// labels, or +inf if any edge is blocked. Charges follow the same entry rule.
double path_cost(const LatticeWorld& world, std::span<const Label> labels, Charges charges,
                 std::span<const int> path);
double path_length(const LatticeWorld& world, std::span<const int> path);
int direction_between(const LatticeWorld& world, int from, int to);

}  // namespace scos
