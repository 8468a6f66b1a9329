// Serial vs OpenMP kernels on growing Sierpinski and interval graphs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <vector>

#include "wkam/kernels.hpp"
#include "wkam/metric_graph.hpp"
#include "wkam/weak_kam.hpp"

namespace {

using namespace wkam;

struct Instance {
  MetricGraph g;
  Hamiltonian H;
  std::vector<double> u;
  std::vector<double> sigma;
  double c;
};

Instance make(int level) {
  MetricGraph g = build_sierpinski(level);
  std::vector<double> f(g.vertex_count());
  for (std::size_t v = 0; v < f.size(); ++v) f[v] = std::cos(2.0 * M_PI * g.coords()[v].x);
  Hamiltonian H = Hamiltonian::power(g, 2.0, f);
  std::vector<double> u(g.vertex_count());
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = 0.3 * std::sin(3.0 * g.coords()[v].x + g.coords()[v].y);
  const double c = critical_value(g, H);
  std::vector<double> sigma(g.vertex_count());
  kernels::serial::sigma_field(H, c, kTolC, sigma);
  return {std::move(g), std::move(H), std::move(u), std::move(sigma), c};
}

const Instance& instance(int level) {
  static std::map<int, Instance> cache;
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, make(level)).first;
  return it->second;
}

template <bool Parallel>
void BM_upwind_step(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  std::vector<double> out(in.u.size());
  const double dt = 0.5 * in.g.min_edge_length() / 4.0;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::upwind_step(in.g, in.H, in.u, dt, out);
    else kernels::serial::upwind_step(in.g, in.H, in.u, dt, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["vertices"] = static_cast<double>(in.g.vertex_count());
}

template <bool Parallel>
void BM_sigma_field(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  std::vector<double> out(in.u.size());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::sigma_field(in.H, in.c, kTolC, out);
    else kernels::serial::sigma_field(in.H, in.c, kTolC, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_min_plus(benchmark::State& state) {
  const Instance& in = instance(static_cast<int>(state.range(0)));
  // every 7th vertex is a source, like an Aubry set spread over the gasket
  std::vector<Seed> seeds;
  for (VertexId v = 0; v < in.g.vertex_count(); v += 7) seeds.push_back({v, in.u[v]});
  std::vector<double> out(in.u.size());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::min_plus_potentials(in.g, in.sigma, seeds, out);
    else kernels::serial::min_plus_potentials(in.g, in.sigma, seeds, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["sources"] = static_cast<double>(seeds.size());
}

}  // namespace

BENCHMARK(BM_upwind_step<false>)->Name("upwind_step/serial")->DenseRange(4, 8, 2);
BENCHMARK(BM_upwind_step<true>)->Name("upwind_step/omp")->DenseRange(4, 8, 2);
BENCHMARK(BM_sigma_field<false>)->Name("sigma_field/serial")->DenseRange(4, 8, 2);
BENCHMARK(BM_sigma_field<true>)->Name("sigma_field/omp")->DenseRange(4, 8, 2);
BENCHMARK(BM_min_plus<false>)->Name("min_plus/serial")->DenseRange(3, 6, 1);
BENCHMARK(BM_min_plus<true>)->Name("min_plus/omp")->DenseRange(3, 6, 1);

BENCHMARK_MAIN();
