#include "wkam/weak_kam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wkam/kernels.hpp"

namespace wkam {

double critical_value(const MetricGraph& g, const Hamiltonian& H) {
  require_on_graph(g, H);
  const auto zero = H.at_zero();
  return *std::max_element(zero.begin(), zero.end());
}

std::vector<VertexId> aubry_set(const MetricGraph& g, const Hamiltonian& H, double c, double tol_aubry) {
  require_on_graph(g, H);
  if (!(tol_aubry >= 0.0)) throw Error(Errc::invalid_argument, "tol_aubry must be nonnegative");
  const auto zero = H.at_zero();
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < zero.size(); ++v) {
    if (zero[v] >= c - tol_aubry) out.push_back(v);
  }
  if (out.empty()) {
    // c above every H(x, 0): keep the argmax so the set stays nonempty
    out.push_back(static_cast<VertexId>(std::max_element(zero.begin(), zero.end()) - zero.begin()));
  }
  return out;
}

NodeFunction sigma_field(const MetricGraph& g, const Hamiltonian& H, double c, double tol_c) {
  require_on_graph(g, H);
  std::vector<double> sigma(g.vertex_count());
  kernels::omp::sigma_field(H, c, tol_c, sigma);
  return NodeFunction(g, std::move(sigma));
}

CriticalData critical_data(const MetricGraph& g, const Hamiltonian& H, double tol_aubry) {
  const double c = critical_value(g, H);
  return CriticalData{c, aubry_set(g, H, c, tol_aubry), sigma_field(g, H, c), tol_aubry};
}

NodeFunction mane_potential(const MetricGraph& g, const NodeFunction& sigma, VertexId y) {
  require_on_graph(g, sigma);
  g.require_vertex(y);
  return NodeFunction(g, kernels::mane_distances(g, sigma.values(), y));
}

NodeFunction mane_potential(const MetricGraph& g, const Hamiltonian& H, double c, VertexId y) {
  return mane_potential(g, sigma_field(g, H, c), y);
}

StationarySolution stationary_solution(const MetricGraph& g, const Hamiltonian& H, double tol_aubry) {
  const CriticalData crit = critical_data(g, H, tol_aubry);
  const VertexId y = crit.aubry.front();
  return StationarySolution{crit.c, mane_potential(g, crit.sigma, y), y};
}

StationaryResidual stationary_residual(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& v, double c,
                                       std::span<const VertexId> source, double tol_aubry) {
  require_on_graph(g, H);
  require_on_graph(g, v);
  std::vector<char> excluded(g.vertex_count(), 0);
  for (VertexId s : source) {
    g.require_vertex(s);
    excluded[s] = 1;
  }
  for (VertexId a : aubry_set(g, H, c, tol_aubry)) excluded[a] = 1;

  std::vector<double> slopes(g.vertex_count());
  kernels::omp::upwind_slopes(g, v.values(), slopes);
  StationaryResidual r;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    const double h = H(x, slopes[x]);
    r.max_sub_violation = std::max(r.max_sub_violation, h - c);
    if (!excluded[x]) r.max_super_violation = std::max(r.max_super_violation, c - h);
  }
  return r;
}

double default_tol_cmp(const NodeFunction& u) { return 1e-12 + 1e-9 * sup_norm(u); }

ComparisonResult comparison_check(const MetricGraph& g, const NodeFunction& u, const NodeFunction& v,
                                  std::span<const VertexId> boundary, std::optional<double> tol) {
  require_on_graph(g, u);
  require_on_graph(g, v);
  if (boundary.empty()) throw Error(Errc::invalid_argument, "comparison_check needs a nonempty boundary");
  ComparisonResult r;
  r.tol = tol.value_or(default_tol_cmp(u));
  r.boundary_max_gap = -std::numeric_limits<double>::infinity();
  for (VertexId b : boundary) {
    g.require_vertex(b);
    r.boundary_max_gap = std::max(r.boundary_max_gap, u[b] - v[b]);
  }
  r.max_gap = -std::numeric_limits<double>::infinity();
  VertexId arg = 0;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    const double d = u[x] - v[x];
    if (d > r.max_gap) {
      r.max_gap = d;
      arg = x;
    }
  }
  r.pass = r.max_gap <= r.boundary_max_gap + r.tol;
  if (!r.pass) r.witness = arg;
  return r;
}

}  // namespace wkam
