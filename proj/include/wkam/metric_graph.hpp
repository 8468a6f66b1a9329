#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "wkam/error.hpp"

namespace wkam {

using VertexId = std::size_t;

struct Edge {
  VertexId a;
  VertexId b;
  double length;
};

struct Neighbor {
  VertexId vertex;
  double length;
};

/// Embedding coordinate; echoed to output files, never used by the solvers.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Finite connected weighted graph standing in for a compact geodesic space.
///
/// The metric is the shortest-path length. Parallel edges collapse to the
/// shorter length at construction; self-loops, non-positive or non-finite
/// lengths and disconnected inputs are rejected. Immutable once built, so a
/// single instance can be shared by concurrent readers.
class MetricGraph {
 public:
  MetricGraph(std::size_t vertex_count, std::span<const Edge> edges,
              std::vector<Point> coords = {});

  std::size_t vertex_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Unordered edges with a < b, sorted by (a, b).
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Neighbor> neighbors(VertexId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  double min_edge_length() const noexcept { return min_edge_length_; }
  double max_edge_length() const noexcept { return max_edge_length_; }

  bool has_coords() const noexcept { return !coords_.empty(); }
  std::span<const Point> coords() const noexcept { return coords_; }

  /// Identity shared by copies; NodeFunctions are tagged with it.
  std::uint64_t id() const noexcept { return id_; }

  bool contains(VertexId v) const noexcept { return v < vertex_count(); }
  void require_vertex(VertexId v) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<Point> coords_;
  double min_edge_length_ = 0.0;
  double max_edge_length_ = 0.0;
  std::uint64_t id_ = 0;
};

/// One finite real per vertex of a specific graph.
class NodeFunction {
 public:
  NodeFunction(const MetricGraph& g, std::vector<double> values);

  static NodeFunction constant(const MetricGraph& g, double value);

  std::uint64_t graph_id() const noexcept { return graph_id_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](VertexId v) const noexcept { return values_[v]; }
  std::span<const double> values() const noexcept { return values_; }

  bool lives_on(const MetricGraph& g) const noexcept {
    return graph_id_ == g.id() && values_.size() == g.vertex_count();
  }

  /// New values on the same graph.
  NodeFunction with_values(std::vector<double> values) const;

  NodeFunction shifted(double k) const;
  NodeFunction scaled(double s) const;

 private:
  std::uint64_t graph_id_;
  std::vector<double> values_;
};

void require_on_graph(const MetricGraph& g, const NodeFunction& f);

double sup_norm(const NodeFunction& f) noexcept;
/// max_x |a(x) - b(x)|; the two functions must live on the same graph.
double sup_distance(const NodeFunction& a, const NodeFunction& b);

// -- builders ---------------------------------------------------------------

inline constexpr int kSierpinskiLevelCap = 10;

MetricGraph build_interval(std::size_t segments, double length);

/// Cycle of `segments` equal edges with total length `circumference`.
MetricGraph build_circle(std::size_t segments, double circumference);

/// Prefractal Sierpinski gasket graph at `level`.
///
/// Vertices are numbered in (row, column) order of the triangular lattice, so
/// the three outer corners are 0, 2^level and vertex_count() - 1.
MetricGraph build_sierpinski(int level);

std::array<VertexId, 3> sierpinski_corners(const MetricGraph& g, int level);

// -- metric -----------------------------------------------------------------

struct Seed {
  VertexId vertex;
  double value;
};

/// Multi-source Dijkstra with a caller-supplied symmetric nonnegative edge cost.
///
/// `cost(a, b, length)` is evaluated once per relaxation. Heap ties are broken
/// by vertex index so the result is reproducible bit for bit.
template <typename EdgeCost>
std::vector<double> shortest_paths(const MetricGraph& g, std::span<const Seed> seeds, EdgeCost&& cost) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.vertex_count(), inf);
  using Entry = std::pair<double, VertexId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (const Seed& s : seeds) {
    g.require_vertex(s.vertex);
    if (s.value < dist[s.vertex]) {
      dist[s.vertex] = s.value;
      heap.emplace(s.value, s.vertex);
    }
  }
  std::vector<char> settled(g.vertex_count(), 0);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    for (const Neighbor& nb : g.neighbors(v)) {
      if (settled[nb.vertex]) continue;
      const double candidate = d + cost(v, nb.vertex, nb.length);
      if (candidate < dist[nb.vertex]) {
        dist[nb.vertex] = candidate;
        heap.emplace(candidate, nb.vertex);
      }
    }
  }
  return dist;
}

std::vector<double> distances_from(const MetricGraph& g, VertexId source);
double shortest_dist(const MetricGraph& g, VertexId x, VertexId y);

// -- slopes -----------------------------------------------------------------

struct Slopes {
  double plus = 0.0;
  double minus = 0.0;
  double full = 0.0;
};

/// One-sided neighbor slopes of f at x:
/// plus = max_y [f(y)-f(x)]_+ / l(x,y), minus = max_y [f(y)-f(x)]_- / l(x,y).
Slopes discrete_slopes(const MetricGraph& g, const NodeFunction& f, VertexId x);

/// max over edges of |f(a)-f(b)| / l(a,b), the Lipschitz constant for the path metric.
double lipschitz_constant(const MetricGraph& g, const NodeFunction& f);

}  // namespace wkam
