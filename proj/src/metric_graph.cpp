#include "wkam/metric_graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>

namespace wkam {

namespace {

std::uint64_t next_graph_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

MetricGraph::MetricGraph(std::size_t vertex_count, std::span<const Edge> edges, std::vector<Point> coords)
    : coords_(std::move(coords)), id_(next_graph_id()) {
  if (vertex_count == 0) throw Error(Errc::invalid_argument, "graph needs at least one vertex");
  if (!coords_.empty() && coords_.size() != vertex_count) {
    throw Error(Errc::invalid_argument, "coordinate count " + std::to_string(coords_.size()) +
                                            " does not match vertex count " + std::to_string(vertex_count));
  }

  // collapse parallel edges to the shorter length
  std::map<std::pair<VertexId, VertexId>, double> unique;
  for (const Edge& e : edges) {
    if (e.a >= vertex_count || e.b >= vertex_count) {
      throw Error(Errc::invalid_argument, "edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) +
                                              ") references a vertex outside [0, " +
                                              std::to_string(vertex_count) + ")");
    }
    if (e.a == e.b) throw Error(Errc::invalid_argument, "self-loop at vertex " + std::to_string(e.a), e.a);
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      std::ostringstream msg;
      msg << "edge (" << e.a << ", " << e.b << ") has non-positive or non-finite length " << e.length;
      throw Error(Errc::invalid_argument, msg.str());
    }
    const auto key = std::minmax(e.a, e.b);
    auto [it, inserted] = unique.try_emplace({key.first, key.second}, e.length);
    if (!inserted) it->second = std::min(it->second, e.length);
  }

  edges_.reserve(unique.size());
  for (const auto& [key, len] : unique) edges_.push_back({key.first, key.second, len});

  std::vector<std::size_t> degree(vertex_count, 0);
  for (const Edge& e : edges_) {
    ++degree[e.a];
    ++degree[e.b];
  }
  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[e.a]++] = {e.b, e.length};
    adjacency_[fill[e.b]++] = {e.a, e.length};
  }
  for (std::size_t v = 0; v < vertex_count; ++v) {
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
              [](const Neighbor& l, const Neighbor& r) { return l.vertex < r.vertex; });
  }

  if (!edges_.empty()) {
    min_edge_length_ = edges_.front().length;
    max_edge_length_ = edges_.front().length;
    for (const Edge& e : edges_) {
      min_edge_length_ = std::min(min_edge_length_, e.length);
      max_edge_length_ = std::max(max_edge_length_, e.length);
    }
  }

  // connectivity by BFS from vertex 0
  std::vector<char> seen(vertex_count, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : neighbors(v)) {
      if (!seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        ++reached;
        stack.push_back(nb.vertex);
      }
    }
  }
  if (reached != vertex_count) {
    const auto missing = static_cast<VertexId>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
    throw Error(Errc::invalid_argument,
                "graph is disconnected: vertex " + std::to_string(missing) + " is unreachable from vertex 0",
                missing);
  }
}

void MetricGraph::require_vertex(VertexId v) const {
  if (!contains(v)) {
    throw Error(Errc::invalid_argument,
                "unknown vertex " + std::to_string(v) + " (graph has " + std::to_string(vertex_count()) + ")", v);
  }
}

NodeFunction::NodeFunction(const MetricGraph& g, std::vector<double> values)
    : graph_id_(g.id()), values_(std::move(values)) {
  if (values_.size() != g.vertex_count()) {
    throw Error(Errc::invalid_argument, "node function has " + std::to_string(values_.size()) +
                                            " values for a graph with " + std::to_string(g.vertex_count()) +
                                            " vertices");
  }
  for (std::size_t v = 0; v < values_.size(); ++v) {
    if (!std::isfinite(values_[v])) {
      throw Error(Errc::invalid_argument, "non-finite value at vertex " + std::to_string(v), v);
    }
  }
}

NodeFunction NodeFunction::constant(const MetricGraph& g, double value) {
  return NodeFunction(g, std::vector<double>(g.vertex_count(), value));
}

NodeFunction NodeFunction::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) {
    throw Error(Errc::invalid_argument, "node function has " + std::to_string(values.size()) + " values, expected " +
                                            std::to_string(values_.size()));
  }
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (!std::isfinite(values[v])) {
      throw Error(Errc::invalid_argument, "non-finite value at vertex " + std::to_string(v), v);
    }
  }
  NodeFunction out = *this;
  out.values_ = std::move(values);
  return out;
}

NodeFunction NodeFunction::shifted(double k) const {
  NodeFunction out = *this;
  for (double& v : out.values_) v += k;
  return out;
}

NodeFunction NodeFunction::scaled(double s) const {
  NodeFunction out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

void require_on_graph(const MetricGraph& g, const NodeFunction& f) {
  if (!f.lives_on(g)) throw Error(Errc::invalid_argument, "node function does not live on this graph");
}

double sup_norm(const NodeFunction& f) noexcept {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const NodeFunction& a, const NodeFunction& b) {
  if (a.graph_id() != b.graph_id() || a.size() != b.size()) {
    throw Error(Errc::invalid_argument, "node functions live on different graphs");
  }
  double m = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) m = std::max(m, std::abs(a[v] - b[v]));
  return m;
}

MetricGraph build_interval(std::size_t segments, double length) {
  if (segments < 1) throw Error(Errc::invalid_argument, "interval needs at least one segment");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(Errc::invalid_argument, "interval length must be positive and finite");
  }
  const double h = length / static_cast<double>(segments);
  std::vector<Edge> edges;
  edges.reserve(segments);
  std::vector<Point> coords(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) {
    coords[i] = {static_cast<double>(i) * length / static_cast<double>(segments), 0.0};
    if (i < segments) edges.push_back({i, i + 1, h});
  }
  return MetricGraph(segments + 1, edges, std::move(coords));
}

MetricGraph build_circle(std::size_t segments, double circumference) {
  if (segments < 3) throw Error(Errc::invalid_argument, "circle needs at least three segments");
  if (!(circumference > 0.0) || !std::isfinite(circumference)) {
    throw Error(Errc::invalid_argument, "circle circumference must be positive and finite");
  }
  const double h = circumference / static_cast<double>(segments);
  const double radius = circumference / (2.0 * M_PI);
  std::vector<Edge> edges;
  std::vector<Point> coords(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    const double angle = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(segments);
    coords[i] = {radius * std::cos(angle), radius * std::sin(angle)};
    edges.push_back({i, (i + 1) % segments, h});
  }
  return MetricGraph(segments, edges, std::move(coords));
}

MetricGraph build_sierpinski(int level) {
  if (level < 0) throw Error(Errc::invalid_argument, "sierpinski level must be nonnegative");
  if (level > kSierpinskiLevelCap) {
    throw Error(Errc::resource_limit, "sierpinski level " + std::to_string(level) + " exceeds the cap of " +
                                          std::to_string(kSierpinskiLevelCap));
  }
  // Lattice coordinates (i, j) denote i*e1 + j*e2 with e1 = (1, 0) and
  // e2 = (1/2, sqrt(3)/2) scaled by 2^-level; keyed as (j, i) for row order.
  using Key = std::pair<long, long>;
  std::vector<std::array<Key, 3>> triangles;
  const long side = 1L << level;
  struct Pending {
    long i, j, size;
  };
  std::vector<Pending> work{{0, 0, side}};
  while (!work.empty()) {
    const Pending t = work.back();
    work.pop_back();
    if (t.size == 1) {
      triangles.push_back({Key{t.j, t.i}, Key{t.j, t.i + 1}, Key{t.j + 1, t.i}});
      continue;
    }
    const long half = t.size / 2;
    work.push_back({t.i, t.j + half, half});
    work.push_back({t.i + half, t.j, half});
    work.push_back({t.i, t.j, half});
  }

  std::map<Key, VertexId> index;
  for (const auto& tri : triangles)
    for (const Key& k : tri) index.emplace(k, 0);
  VertexId next = 0;
  std::vector<Point> coords;
  coords.reserve(index.size());
  const double scale = std::ldexp(1.0, -level);
  for (auto& [key, id] : index) {
    id = next++;
    const auto [j, i] = key;
    coords.push_back({scale * (static_cast<double>(i) + 0.5 * static_cast<double>(j)),
                      scale * (std::sqrt(3.0) / 2.0) * static_cast<double>(j)});
  }

  std::vector<Edge> edges;
  edges.reserve(3 * triangles.size());
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      edges.push_back({index.at(tri[k]), index.at(tri[(k + 1) % 3]), scale});
    }
  }
  return MetricGraph(index.size(), edges, std::move(coords));
}

std::array<VertexId, 3> sierpinski_corners(const MetricGraph& g, int level) {
  return {0, static_cast<VertexId>(1) << level, g.vertex_count() - 1};
}

std::vector<double> distances_from(const MetricGraph& g, VertexId source) {
  const Seed seed{source, 0.0};
  return shortest_paths(g, std::span<const Seed>(&seed, 1), [](VertexId, VertexId, double len) { return len; });
}

double shortest_dist(const MetricGraph& g, VertexId x, VertexId y) {
  g.require_vertex(x);
  g.require_vertex(y);
  return distances_from(g, x)[y];
}

Slopes discrete_slopes(const MetricGraph& g, const NodeFunction& f, VertexId x) {
  require_on_graph(g, f);
  g.require_vertex(x);
  Slopes s;
  for (const Neighbor& nb : g.neighbors(x)) {
    const double diff = f[nb.vertex] - f[x];
    s.plus = std::max(s.plus, std::max(diff, 0.0) / nb.length);
    s.minus = std::max(s.minus, std::max(-diff, 0.0) / nb.length);
  }
  s.full = std::max(s.plus, s.minus);
  return s;
}

double lipschitz_constant(const MetricGraph& g, const NodeFunction& f) {
  require_on_graph(g, f);
  double lip = 0.0;
  for (const Edge& e : g.edges()) lip = std::max(lip, std::abs(f[e.a] - f[e.b]) / e.length);
  return lip;
}

}  // namespace wkam
