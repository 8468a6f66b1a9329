#include "wkam/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wkam/kernels.hpp"
#include "wkam/weak_kam.hpp"

namespace wkam {

double scheme_tolerance(const MetricGraph& g, double dt) noexcept { return 10.0 * (g.max_edge_length() + dt); }

NodeFunction phi_minus(const EvolutionTrace& trace, double c) {
  if (trace.snapshots.empty()) throw Error(Errc::invalid_argument, "phi_minus needs a nonempty trace");
  std::vector<double> out(trace.snapshots.front().size(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    const auto u = trace.snapshots[k].values();
    const double shift = c * trace.times[k];
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = std::min(out[x], u[x] + shift);
  }
  return trace.snapshots.front().with_values(std::move(out));
}

NodeFunction phi_infinity(const MetricGraph& g, const NodeFunction& sigma, const NodeFunction& phi_minus,
                          std::span<const VertexId> aubry) {
  require_on_graph(g, sigma);
  require_on_graph(g, phi_minus);
  if (aubry.empty()) throw Error(Errc::invalid_argument, "phi_infinity needs a nonempty Aubry set");
  std::vector<Seed> seeds;
  seeds.reserve(aubry.size());
  for (VertexId y : aubry) {
    g.require_vertex(y);
    seeds.push_back({y, phi_minus[y]});
  }
  std::vector<double> out(g.vertex_count());
  kernels::omp::min_plus_potentials(g, sigma.values(), seeds, out);
  return NodeFunction(g, std::move(out));
}

NodeFunction phi_infinity(const MetricGraph& g, const Hamiltonian& H, double c, const NodeFunction& phi_minus,
                          std::span<const VertexId> aubry) {
  return phi_infinity(g, sigma_field(g, H, c), phi_minus, aubry);
}

ConvergenceReport convergence_report(const EvolutionTrace& trace, double c, const NodeFunction& target, double tol,
                                     std::span<const VertexId> aubry, double tol_slack) {
  if (trace.snapshots.empty()) throw Error(Errc::invalid_argument, "convergence_report needs a nonempty trace");
  if (target.graph_id() != trace.snapshots.front().graph_id() || target.size() != trace.snapshots.front().size()) {
    throw Error(Errc::invalid_argument, "target does not live on the trace's graph");
  }
  ConvergenceReport r;
  r.tol = tol;
  r.aubry_slack = 10.0 * trace.dt * tol_slack;
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    const auto u = trace.snapshots[k].values();
    const double shift = c * trace.times[k];
    double gap = 0.0;
    for (std::size_t x = 0; x < u.size(); ++x) gap = std::max(gap, std::abs(u[x] + shift - target[x]));
    r.gap_series.emplace_back(trace.times[k], gap);
    if (!r.t_star && gap <= tol) r.t_star = trace.times[k];
    if (k > 0) {
      const auto prev = trace.snapshots[k - 1].values();
      const double prev_shift = c * trace.times[k - 1];
      for (VertexId a : aubry) {
        const double rise = (u[a] + shift) - (prev[a] + prev_shift);
        r.aubry_max_violation = std::max(r.aubry_max_violation, rise);
      }
    }
  }
  r.aubry_monotone_ok = r.aubry_max_violation <= r.aubry_slack;
  r.final_gap = r.gap_series.back().second;
  return r;
}

bool gap_nonincreasing_after_peak(const ConvergenceReport& report, double slack) {
  const auto& s = report.gap_series;
  if (s.empty()) return true;
  std::size_t peak = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].second > s[peak].second) peak = k;
  }
  for (std::size_t k = peak + 1; k < s.size(); ++k) {
    if (s[k].second > s[k - 1].second + slack) return false;
  }
  return true;
}

namespace {

double shifted_residual_max(const MetricGraph& g, const Hamiltonian& H, std::span<const double> w_now,
                            std::span<const double> w_next, double rate_scale, double step, double c,
                            std::vector<double>& slopes) {
  kernels::omp::upwind_slopes(g, w_now, slopes);
  double worst = 0.0;
  for (std::size_t x = 0; x < w_now.size(); ++x) {
    const double rate = rate_scale * (w_next[x] - w_now[x]) / step;
    worst = std::max(worst, std::abs(rate + H(x, slopes[x]) - c));
  }
  return worst;
}

}  // namespace

double trace_residual(const MetricGraph& g, const EvolutionTrace& trace, const Hamiltonian& H, double c) {
  require_on_graph(g, H);
  if (trace.snapshots.size() < 2) throw Error(Errc::range, "trace needs at least two snapshots to difference");
  const std::size_t n = g.vertex_count();
  const double spacing = trace.spacing();
  std::vector<double> slopes(n), w_now(n), w_next(n);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < trace.snapshots.size(); ++k) {
    for (std::size_t x = 0; x < n; ++x) {
      w_now[x] = trace.snapshots[k][x] + c * trace.times[k];
      w_next[x] = trace.snapshots[k + 1][x] + c * trace.times[k + 1];
    }
    worst = std::max(worst, shifted_residual_max(g, H, w_now, w_next, 1.0, spacing, c, slopes));
  }
  return worst;
}

double rescale_check(const MetricGraph& g, const EvolutionTrace& trace, double lambda, const Hamiltonian& H,
                     double c) {
  require_on_graph(g, H);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::invalid_argument, "lambda must be positive");
  if (trace.snapshots.size() < 2) throw Error(Errc::range, "trace needs at least two snapshots to difference");
  const std::size_t last = trace.snapshots.size() - 1;
  // rescaled grid s_j = j * spacing reads the trace at index position j / lambda
  const auto count = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(last) + 1e-9));
  if (count < 1) {
    throw Error(Errc::range, "lambda = " + std::to_string(lambda) +
                                 " maps the first rescaled step beyond the stored horizon");
  }
  const std::size_t n = g.vertex_count();
  auto sample = [&](std::size_t j, std::vector<double>& w) {
    const double position = static_cast<double>(j) / lambda;
    auto k = static_cast<std::size_t>(std::floor(position));
    double frac = position - static_cast<double>(k);
    if (k >= last) {
      k = last;
      frac = 0.0;
    }
    const auto& a = trace.snapshots[k];
    if (frac == 0.0) {
      for (std::size_t x = 0; x < n; ++x) w[x] = a[x] + c * trace.times[k];
      return;
    }
    const auto& b = trace.snapshots[k + 1];
    const double t = trace.times[k] + frac * (trace.times[k + 1] - trace.times[k]);
    for (std::size_t x = 0; x < n; ++x) w[x] = a[x] + frac * (b[x] - a[x]) + c * t;
  };

  std::vector<double> slopes(n), w_now(n), w_next(n);
  const double spacing = trace.spacing();
  double worst = 0.0;
  sample(0, w_now);
  for (std::size_t j = 0; j < count; ++j) {
    sample(j + 1, w_next);
    worst = std::max(worst, shifted_residual_max(g, H, w_now, w_next, lambda, spacing, c, slopes));
    w_now.swap(w_next);
  }
  return worst;
}

}  // namespace wkam
