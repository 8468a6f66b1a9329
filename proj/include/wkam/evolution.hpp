#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wkam/hamiltonian.hpp"
#include "wkam/metric_graph.hpp"

namespace wkam {

inline constexpr double kDefaultCflFactor = 0.9;
inline constexpr std::string_view kSchemeUpwindEuler = "upwind-euler";

/// Stored snapshots of an explicit run; times are uniformly spaced by
/// dt * store_every and start at 0 with the initial data.
struct EvolutionTrace {
  std::vector<double> times;
  std::vector<NodeFunction> snapshots;
  double dt = 0.0;
  std::string scheme{kSchemeUpwindEuler};
  double cfl_factor = kDefaultCflFactor;
  std::size_t store_every = 1;
  std::size_t steps = 0;
  std::size_t restarts = 0;  ///< CFL restarts with a halved step
  double slope_bound = 0.0;  ///< a priori bound on every snapshot's discrete slope
  double K = 0.0;            ///< barrier rate: |u(t) - u0| <= K t

  double spacing() const noexcept { return dt * static_cast<double>(store_every); }
  double t_end() const noexcept { return times.back(); }

  /// Snapshots from the first stored time >= t0 on, with times shifted to start at 0.
  EvolutionTrace tail(double t0) const;
};

/// dt = cfl_factor * min_edge_length / L_H with L_H the p-Lipschitz bound of H
/// on [0, slope_bound]; t_horizon / 100 when H does not depend on p.
double cfl_dt(const MetricGraph& g, const Hamiltonian& H, double slope_bound,
              double cfl_factor = kDefaultCflFactor, double t_horizon = 1.0);

/// u'(x) = u(x) - dt * H(x, D^-u(x)).
NodeFunction step(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& u, double dt);

struct SolveOptions {
  std::size_t store_every = 1;
  double cfl_factor = kDefaultCflFactor;
  std::size_t p_samples = 64;
  std::size_t recheck_every = 100;
  std::size_t max_restarts = 16;
  double barrier_tol = 1e-9;
  std::function<void(const std::string&)> log;  ///< receives restart notices; stderr when empty
};

/// Runs the explicit scheme to t_end. Checks the barriers u0 - Kt <= u <= u0 + Kt
/// each step and the slope bound every recheck_every steps; a slope overshoot that
/// makes dt unstable restarts the whole run with half the step.
EvolutionTrace solve(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& u0, double t_end,
                     const SolveOptions& options = {});

/// Hopf-Lax value min_y [u0(y) + t L(d(x, y) / t)] - t f0 for an x-independent
/// H = h(|p|) + f0, with L the Legendre transform of h by dense grid search
/// (closed form for the affine family).
NodeFunction hopf_lax_oracle(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& u0, double t,
                             std::size_t grid_points = 100000);

}  // namespace wkam
