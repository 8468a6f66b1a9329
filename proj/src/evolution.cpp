#include "wkam/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "wkam/kernels.hpp"

namespace wkam {

EvolutionTrace EvolutionTrace::tail(double t0) const {
  const auto first = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t0) - times.begin());
  if (first >= times.size()) throw Error(Errc::range, "tail start lies beyond the stored horizon");
  EvolutionTrace out = *this;
  out.times.assign(times.begin() + static_cast<std::ptrdiff_t>(first), times.end());
  out.snapshots.assign(snapshots.begin() + static_cast<std::ptrdiff_t>(first), snapshots.end());
  const double base = out.times.front();
  for (double& t : out.times) t -= base;
  out.steps = steps - first * store_every;
  return out;
}

double cfl_dt(const MetricGraph& g, const Hamiltonian& H, double slope_bound, double cfl_factor, double t_horizon) {
  require_on_graph(g, H);
  if (!(cfl_factor > 0.0 && cfl_factor <= 1.0)) throw Error(Errc::invalid_argument, "cfl_factor must lie in (0, 1]");
  if (!(slope_bound >= 0.0) || !std::isfinite(slope_bound)) {
    throw Error(Errc::invalid_argument, "slope_bound must be finite and nonnegative");
  }
  if (!(t_horizon > 0.0)) throw Error(Errc::invalid_argument, "t_horizon must be positive");
  const double lip = H.p_lipschitz(slope_bound);
  if (lip <= 0.0) return t_horizon / 100.0;
  return cfl_factor * g.min_edge_length() / lip;
}

namespace {

void require_finite_step(std::span<const double> values) {
  for (std::size_t x = 0; x < values.size(); ++x) {
    if (!std::isfinite(values[x])) {
      throw Error(Errc::numerical_blowup, "explicit step produced a non-finite value at vertex " + std::to_string(x),
                  x);
    }
  }
}

double max_slope(const MetricGraph& g, std::span<const double> u, std::vector<double>& scratch) {
  kernels::omp::upwind_slopes(g, u, scratch);
  return scratch.empty() ? 0.0 : *std::max_element(scratch.begin(), scratch.end());
}

}  // namespace

NodeFunction step(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& u, double dt) {
  require_on_graph(g, H);
  require_on_graph(g, u);
  std::vector<double> out(g.vertex_count());
  kernels::omp::upwind_step(g, H, u.values(), dt, out);
  require_finite_step(out);
  return NodeFunction(g, std::move(out));
}

EvolutionTrace solve(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& u0, double t_end,
                     const SolveOptions& options) {
  require_on_graph(g, H);
  require_on_graph(g, u0);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(Errc::invalid_argument, "t_end must be positive");
  if (options.store_every < 1) throw Error(Errc::invalid_argument, "store_every must be at least 1");
  if (!H.monotone()) throw Error(Errc::domain, "the upwind scheme needs p -> H(x, p) nondecreasing");
  const auto log = [&](const std::string& msg) {
    if (options.log) {
      options.log(msg);
    } else {
      std::clog << "[wkam] " << msg << '\n';
    }
  };

  const std::size_t n = g.vertex_count();
  const AssumptionReport report = check_assumptions(g, H, options.p_samples, &u0);
  const double initial_slope = lipschitz_constant(g, u0);

  // One-step increment bounds every later one (the scheme is non-expansive),
  // so H(x, D^-u) <= K_step and slopes stay below max_x sigma at level K_step.
  std::vector<double> scratch(n);
  kernels::omp::upwind_slopes(g, u0.values(), scratch);
  double k_step = 0.0;
  for (std::size_t x = 0; x < n; ++x) k_step = std::max(k_step, std::abs(H(x, scratch[x])));
  double level_bound = 0.0;
  try {
    for (std::size_t x = 0; x < n; ++x) level_bound = std::max(level_bound, sigma_c(H, x, k_step));
  } catch (const Error& e) {
    if (e.code() != Errc::coercivity_violation) throw;
  }
  double slope_bound = std::max({initial_slope, report.L.value_or(0.0), level_bound});

  double k_barrier = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    k_barrier = std::max({k_barrier, std::abs(H(x, 0.0)), std::abs(H(x, initial_slope))});
  }

  const double dt_cfl = cfl_dt(g, H, slope_bound, options.cfl_factor, t_end);
  auto steps_for = [&](double dt_max) {
    auto count = static_cast<std::size_t>(std::ceil(t_end / dt_max - 1e-12));
    count = std::max<std::size_t>(count, 1);
    const std::size_t se = options.store_every;
    return ((count + se - 1) / se) * se;
  };
  std::size_t total = steps_for(dt_cfl);

  for (std::size_t restart = 0;; ++restart) {
    const double dt = t_end / static_cast<double>(total);
    EvolutionTrace trace;
    trace.dt = dt;
    trace.cfl_factor = options.cfl_factor;
    trace.store_every = options.store_every;
    trace.steps = total;
    trace.restarts = restart;
    trace.slope_bound = slope_bound;
    trace.K = k_barrier;
    trace.times.push_back(0.0);
    trace.snapshots.push_back(u0);

    std::vector<double> current(u0.values().begin(), u0.values().end());
    std::vector<double> next(n);
    bool restarted = false;
    for (std::size_t k = 1; k <= total; ++k) {
      kernels::omp::upwind_step(g, H, current, dt, next);
      require_finite_step(next);
      current.swap(next);
      const double t = static_cast<double>(k) * dt;

      const double reach = k_barrier * t + options.barrier_tol;
      for (std::size_t x = 0; x < n; ++x) {
        if (std::abs(current[x] - u0[x]) > reach) {
          std::ostringstream msg;
          msg.precision(17);
          msg << "|u(t) - u0| = " << std::abs(current[x] - u0[x]) << " exceeds K t = " << k_barrier * t
              << " at vertex " << x << ", t = " << t;
          throw InvariantViolation("barrier", msg.str());
        }
      }

      if (k % options.recheck_every == 0 || k == total) {
        const double observed = max_slope(g, current, scratch);
        if (observed > slope_bound * (1.0 + 1e-9) + 1e-12) {
          if (H.p_lipschitz(observed) > H.p_lipschitz(slope_bound) && restart < options.max_restarts) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "slope " << observed << " exceeded the CFL bound " << slope_bound << " at t = " << t
                << "; restarting with dt = " << dt / 2;
            log(msg.str());
            slope_bound = observed;
            total *= 2;
            restarted = true;
            break;
          }
          std::ostringstream msg;
          msg.precision(17);
          msg << "discrete slope " << observed << " exceeds the bound " << slope_bound << " at t = " << t;
          throw InvariantViolation("lipschitz", msg.str());
        }
      }

      if (k % options.store_every == 0) {
        trace.times.push_back(t);
        trace.snapshots.emplace_back(g, current);
      }
    }
    if (!restarted) return trace;
  }
}

namespace {

/// sup_{0 <= p <= P} (p q - h(p)) on a uniform grid, P chosen so the maximizer
/// of the concave objective lies inside [0, P].
class LegendreByGrid {
 public:
  LegendreByGrid(const Hamiltonian& H, double f0, std::size_t points) : H_(H), f0_(f0), points_(points) {}

  double operator()(double q) {
    auto it = memo_.find(q);
    if (it != memo_.end()) return it->second;
    const double cap = H_.p_cap();
    double upper = std::min(1.0, cap);
    while (upper < cap && h(upper) <= upper * q) upper = std::min(2.0 * upper, cap);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_; ++i) {
      const double p = upper * static_cast<double>(i) / static_cast<double>(points_ - 1);
      best = std::max(best, p * q - h(p));
    }
    memo_.emplace(q, best);
    return best;
  }

 private:
  double h(double p) const { return H_(0, p) - f0_; }

  const Hamiltonian& H_;
  double f0_;
  std::size_t points_;
  std::map<double, double> memo_;
};

}  // namespace

NodeFunction hopf_lax_oracle(const MetricGraph& g, const Hamiltonian& H, const NodeFunction& u0, double t,
                             std::size_t grid_points) {
  require_on_graph(g, H);
  require_on_graph(g, u0);
  if (!H.x_independent()) throw Error(Errc::unsupported_oracle, "Hopf-Lax oracle needs an x-independent Hamiltonian");
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "oracle time must be nonnegative");
  if (grid_points < 2) throw Error(Errc::invalid_argument, "oracle grid needs at least two points");
  if (t == 0.0) return u0;

  const std::size_t n = g.vertex_count();
  const double f0 = H(0, 0.0);
  LegendreByGrid legendre(H, f0, grid_points);
  const bool affine = H.family() == Family::affine;
  const double speed = affine ? H.coefficients().front() : 0.0;

  std::vector<double> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto dist = distances_from(g, x);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < n; ++y) {
      double cost;
      if (affine) {
        // L(q) = 0 for q <= a, +inf beyond: u0 minimised over the ball of radius a t
        if (dist[y] > speed * t * (1.0 + 1e-12)) continue;
        cost = 0.0;
      } else {
        cost = t * legendre(dist[y] / t);
      }
      best = std::min(best, u0[y] + cost);
    }
    out[x] = best - t * f0;
  }
  return NodeFunction(g, std::move(out));
}

}  // namespace wkam
