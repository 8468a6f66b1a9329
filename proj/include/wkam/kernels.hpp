#pragma once

// Data-parallel vertex loops used by the solvers. Every kernel has a serial
// reference and an OpenMP version; both write disjoint output slots and must
// agree bit for bit, which the kernel tests check.

#include <span>
#include <vector>

#include "wkam/hamiltonian.hpp"
#include "wkam/metric_graph.hpp"

namespace wkam::kernels {

/// D^-u(x) = max over neighbors of (u(x) - u(y))_+ / l(x, y).
inline double upwind_slope_at(const MetricGraph& g, std::span<const double> u, VertexId x) noexcept {
  double s = 0.0;
  const double ux = u[x];
  for (const Neighbor& nb : g.neighbors(x)) {
    const double d = ux - u[nb.vertex];
    if (d > 0.0) {
      const double q = d / nb.length;
      if (q > s) s = q;
    }
  }
  return s;
}

/// Edge cost of the Mane potential: trapezoid rule for the density sigma.
inline double trapezoid_cost(std::span<const double> sigma, VertexId a, VertexId b, double length) noexcept {
  return 0.5 * (sigma[a] + sigma[b]) * length;
}

namespace serial {

void upwind_slopes(const MetricGraph& g, std::span<const double> u, std::span<double> out);

/// out(x) = u(x) - dt * H(x, D^-u(x)); `out` must not alias `u`.
void upwind_step(const MetricGraph& g, const Hamiltonian& H, std::span<const double> u, double dt,
                 std::span<double> out);

void sigma_field(const Hamiltonian& H, double c, double tol_c, std::span<double> out);

/// out(x) = min over seeds y of [S(x, y) + value(y)], one Dijkstra per seed.
void min_plus_potentials(const MetricGraph& g, std::span<const double> sigma, std::span<const Seed> seeds,
                         std::span<double> out);

}  // namespace serial

namespace omp {

void upwind_slopes(const MetricGraph& g, std::span<const double> u, std::span<double> out);
void upwind_step(const MetricGraph& g, const Hamiltonian& H, std::span<const double> u, double dt,
                 std::span<double> out);
void sigma_field(const Hamiltonian& H, double c, double tol_c, std::span<double> out);
void min_plus_potentials(const MetricGraph& g, std::span<const double> sigma, std::span<const Seed> seeds,
                         std::span<double> out);

}  // namespace omp

/// S(., y) for a single source y.
std::vector<double> mane_distances(const MetricGraph& g, std::span<const double> sigma, VertexId y);

}  // namespace wkam::kernels
