#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wkam/hamiltonian.hpp"
#include "wkam/metric_graph.hpp"

namespace wkam {

inline constexpr double kTolAubry = 1e-9;

/// Critical value, Aubry-like set and the subsolution slope field.
struct CriticalData {
  double c = 0.0;
  std::vector<VertexId> aubry;  ///< ascending vertex ids, never empty
  NodeFunction sigma;
  double tol_aubry = kTolAubry;
};

/// c = max over vertices of H(x, 0).
double critical_value(const MetricGraph& g, const Hamiltonian& H);

/// Vertices with H(x, 0) >= c - tol_aubry, ascending.
std::vector<VertexId> aubry_set(const MetricGraph& g, const Hamiltonian& H, double c, double tol_aubry = kTolAubry);

/// sigma_c at every vertex (parallel kernel).
NodeFunction sigma_field(const MetricGraph& g, const Hamiltonian& H, double c, double tol_c = kTolC);

CriticalData critical_data(const MetricGraph& g, const Hamiltonian& H, double tol_aubry = kTolAubry);

/// Mane potential S(., y): shortest-path value from y under the edge cost
/// l(a, b) * (sigma(a) + sigma(b)) / 2.
NodeFunction mane_potential(const MetricGraph& g, const Hamiltonian& H, double c, VertexId y);
NodeFunction mane_potential(const MetricGraph& g, const NodeFunction& sigma, VertexId y);

struct StationarySolution {
  double c = 0.0;
  NodeFunction v;
  VertexId source = 0;
};

/// v = S(., y) with y the lowest-index Aubry vertex.
StationarySolution stationary_solution(const MetricGraph& g, const Hamiltonian& H, double tol_aubry = kTolAubry);

struct StationaryResidual {
  double max_sub_violation = 0.0;
  double max_super_violation = 0.0;
};

/// Residual of H(x, D^-v(x)) = c. The supersolution part skips `source` and
/// the Aubry set, where v = S(., y) is only a subsolution.
StationaryResidual stationary_residual(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& v, double c,
                                       std::span<const VertexId> source = {}, double tol_aubry = kTolAubry);

struct ComparisonResult {
  bool pass = true;
  double max_gap = 0.0;           ///< max_x (u - v)
  double boundary_max_gap = 0.0;  ///< max over the boundary of (u - v)
  double tol = 0.0;
  std::optional<VertexId> witness;  ///< vertex attaining max_gap when the check fails
};

/// 1e-12 + 1e-9 * |u|_inf
double default_tol_cmp(const NodeFunction& u);

/// Passes iff max_x (u - v) <= max_{boundary} (u - v) + tol.
ComparisonResult comparison_check(const MetricGraph& g, const NodeFunction& u, const NodeFunction& v,
                                  std::span<const VertexId> boundary, std::optional<double> tol = std::nullopt);

}  // namespace wkam
