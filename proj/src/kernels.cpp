#include "wkam/kernels.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

namespace wkam::kernels {

std::vector<double> mane_distances(const MetricGraph& g, std::span<const double> sigma, VertexId y) {
  const Seed seed{y, 0.0};
  return shortest_paths(g, std::span<const Seed>(&seed, 1),
                        [sigma](VertexId a, VertexId b, double len) { return trapezoid_cost(sigma, a, b, len); });
}

namespace {

// Exceptions cannot cross an OpenMP region; keep the one from the lowest index.
class FirstError {
 public:
  void capture(std::size_t index) {
    std::lock_guard lock(mutex_);
    if (!error_ || index < index_) {
      error_ = std::current_exception();
      index_ = index;
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
  std::size_t index_ = std::numeric_limits<std::size_t>::max();
};

}  // namespace

namespace serial {

void upwind_slopes(const MetricGraph& g, std::span<const double> u, std::span<double> out) {
  for (std::size_t x = 0; x < g.vertex_count(); ++x) out[x] = upwind_slope_at(g, u, x);
}

void upwind_step(const MetricGraph& g, const Hamiltonian& H, std::span<const double> u, double dt,
                 std::span<double> out) {
  for (std::size_t x = 0; x < g.vertex_count(); ++x) out[x] = u[x] - dt * H(x, upwind_slope_at(g, u, x));
}

void sigma_field(const Hamiltonian& H, double c, double tol_c, std::span<double> out) {
  for (std::size_t x = 0; x < H.vertex_count(); ++x) out[x] = sigma_c(H, x, c, tol_c);
}

void min_plus_potentials(const MetricGraph& g, std::span<const double> sigma, std::span<const Seed> seeds,
                         std::span<double> out) {
  std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
  for (const Seed& s : seeds) {
    const auto dist = mane_distances(g, sigma, s.vertex);
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = std::min(out[x], dist[x] + s.value);
  }
}

}  // namespace serial

namespace omp {

void upwind_slopes(const MetricGraph& g, std::span<const double> u, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(g.vertex_count());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t x = 0; x < n; ++x) out[x] = upwind_slope_at(g, u, static_cast<VertexId>(x));
}

void upwind_step(const MetricGraph& g, const Hamiltonian& H, std::span<const double> u, double dt,
                 std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(g.vertex_count());
  FirstError error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto x = static_cast<VertexId>(i);
    try {
      out[x] = u[x] - dt * H(x, upwind_slope_at(g, u, x));
    } catch (...) {
      error.capture(x);
    }
  }
  error.rethrow();
}

void sigma_field(const Hamiltonian& H, double c, double tol_c, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(H.vertex_count());
  FirstError error;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto x = static_cast<VertexId>(i);
    try {
      out[x] = sigma_c(H, x, c, tol_c);
    } catch (...) {
      error.capture(x);
    }
  }
  error.rethrow();
}

void min_plus_potentials(const MetricGraph& g, std::span<const double> sigma, std::span<const Seed> seeds,
                         std::span<double> out) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::fill(out.begin(), out.end(), inf);
  const auto count = static_cast<std::ptrdiff_t>(seeds.size());
  FirstError error;
#pragma omp parallel
  {
    std::vector<double> local(out.size(), inf);
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        const Seed& s = seeds[static_cast<std::size_t>(i)];
        const auto dist = mane_distances(g, sigma, s.vertex);
        for (std::size_t x = 0; x < local.size(); ++x) local[x] = std::min(local[x], dist[x] + s.value);
      } catch (...) {
        error.capture(static_cast<std::size_t>(i));
      }
    }
    // min is exact, so the merge order cannot change the result
#pragma omp critical(wkam_min_plus_merge)
    for (std::size_t x = 0; x < out.size(); ++x) out[x] = std::min(out[x], local[x]);
  }
  error.rethrow();
}

}  // namespace omp

}  // namespace wkam::kernels
