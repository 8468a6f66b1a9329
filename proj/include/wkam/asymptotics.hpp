#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wkam/evolution.hpp"
#include "wkam/hamiltonian.hpp"
#include "wkam/metric_graph.hpp"

namespace wkam {

/// 10 * (h + dt) with h the longest edge: the tolerance every large-time
/// identity is checked against.
double scheme_tolerance(const MetricGraph& g, double dt) noexcept;

/// phi_-(x) = min over stored snapshots of u(t, x) + c t.
NodeFunction phi_minus(const EvolutionTrace& trace, double c);

/// phi_inf(x) = min over y in the Aubry set of S(x, y) + phi_-(y), one Mane
/// potential per source, sources processed in parallel.
NodeFunction phi_infinity(const MetricGraph& g, const NodeFunction& sigma, const NodeFunction& phi_minus,
                          std::span<const VertexId> aubry);
NodeFunction phi_infinity(const MetricGraph& g, const Hamiltonian& H, double c, const NodeFunction& phi_minus,
                          std::span<const VertexId> aubry);

struct ConvergenceReport {
  std::vector<std::pair<double, double>> gap_series;  ///< (t, |u(t) + ct - target|_inf)
  bool aubry_monotone_ok = true;
  double aubry_max_violation = 0.0;  ///< largest increase of u + ct between stored times on the Aubry set
  double aubry_slack = 0.0;
  double final_gap = 0.0;
  std::optional<double> t_star;  ///< first stored time with gap <= tol
  double tol = 0.0;
};

/// `tol_slack` scales the 10 dt allowance for the Aubry monotonicity check.
ConvergenceReport convergence_report(const EvolutionTrace& trace, double c, const NodeFunction& target, double tol,
                                     std::span<const VertexId> aubry, double tol_slack = 1.0);

/// True when the gap series never rises by more than `slack` after its first maximum.
bool gap_nonincreasing_after_peak(const ConvergenceReport& report, double slack = 0.0);

/// max over stored steps and vertices of |(w_{k+1} - w_k) / dt + H(x, D^-w_k) - c|
/// with w_k = u(t_k) + c t_k.
double trace_residual(const MetricGraph& g, const EvolutionTrace& trace, const Hamiltonian& H, double c);

/// Residual of lambda dw/dt + H(x, |Dw|) = c for w(s) = u(s / lambda) + c s / lambda,
/// sampled on s_j = j * spacing with forward differences. Snapshots are
/// interpolated linearly in time when s_j / lambda falls between stored times.
double rescale_check(const MetricGraph& g, const EvolutionTrace& trace, double lambda, const Hamiltonian& H,
                     double c);

}  // namespace wkam
