#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "wkam/asymptotics.hpp"
#include "wkam/error.hpp"
#include "wkam/evolution.hpp"
#include "wkam/weak_kam.hpp"

using namespace wkam;

namespace {

std::vector<double> cos_profile(const MetricGraph& g) {
  std::vector<double> f(g.vertex_count());
  for (VertexId v = 0; v < f.size(); ++v) f[v] = std::cos(2.0 * M_PI * g.coords()[v].x);
  return f;
}

// u(t) = v - c t + drift(t), stored at t_k = k dt
EvolutionTrace synthetic(const NodeFunction& v, double c, double dt, std::size_t count,
                         const std::function<double(std::size_t, VertexId)>& drift) {
  EvolutionTrace tr;
  tr.dt = dt;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = dt * static_cast<double>(k);
    std::vector<double> u(v.size());
    for (VertexId x = 0; x < u.size(); ++x) u[x] = v[x] - c * t + drift(k, x);
    tr.times.push_back(t);
    tr.snapshots.push_back(v.with_values(u));
  }
  tr.steps = count - 1;
  return tr;
}

}  // namespace

TEST_CASE("phi_minus examples") {
  const auto g = build_interval(30, 1.0);
  const auto st = stationary_solution(g, Hamiltonian::affine(g, 1.0, cos_profile(g)));
  const auto flat = synthetic(st.v, st.c, 0.01, 20, [](std::size_t, VertexId) { return 0.0; });
  const auto pm = phi_minus(flat, st.c);
  for (VertexId x = 0; x < g.vertex_count(); ++x) CHECK(pm[x] == doctest::Approx(st.v[x]).epsilon(1e-14));

  const auto down = synthetic(st.v, st.c, 0.01, 20, [](std::size_t k, VertexId x) { return -0.1 * k * (1.0 + x); });
  const auto pd = phi_minus(down, st.c);
  for (VertexId x = 0; x < g.vertex_count(); ++x)
    CHECK(pd[x] == doctest::Approx(down.snapshots.back()[x] + st.c * down.t_end()).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<std::vector<double>> drift(25, std::vector<double>(g.vertex_count()));
  for (auto& row : drift)
    for (auto& d : row) d = noise(rng);
  const auto gen = synthetic(st.v, st.c, 0.02, 25, [&](std::size_t k, VertexId x) { return drift[k][x]; });
  const auto pg = phi_minus(gen, st.c);
  // the definition, scanned from the last snapshot back
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    double m = INFINITY;
    for (std::size_t k = gen.snapshots.size(); k-- > 0;) m = std::min(m, gen.snapshots[k][x] + st.c * gen.times[k]);
    CHECK(pg[x] == m);
  }
}

TEST_CASE("phi_infinity examples") {
  const auto g = build_sierpinski(3);
  const auto H1 = Hamiltonian::affine(g, 1.0, [&] {
    std::vector<double> f(g.vertex_count(), -1.0);
    f[5] = 0.0;  // c = 0, A = {5}; sigma = 1 off the source
    return f;
  }());
  const auto crit = critical_data(g, H1);
  REQUIRE(crit.aubry == std::vector<VertexId>{5});
  std::vector<double> pm(g.vertex_count(), 3.0);
  pm[5] = 0.0;
  const auto pinf = phi_infinity(g, crit.sigma, NodeFunction(g, pm), crit.aubry);
  const auto d = distances_from(g, 5);
  for (const auto& e : g.edges()) {
    // sigma is 0 at the source and 1 elsewhere; away from 5 the density is one
    if (e.a != 5 && e.b != 5) CHECK(crit.sigma[e.a] == doctest::Approx(1.0));
  }
  CHECK(pinf[5] == 0.0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(pinf[v] <= d[v] + 1e-15);

  const auto eik = Hamiltonian::affine(g, 1.0, std::vector<double>(g.vertex_count(), 0.0));
  const auto ce = critical_data(g, eik);
  std::mt19937_64 rng(2);
  const NodeFunction r(g, oracle::random_field(rng, g.vertex_count(), -2.0, 2.0));
  const auto pe = phi_infinity(g, ce.sigma, r, ce.aubry);
  double m = INFINITY;
  for (VertexId v = 0; v < g.vertex_count(); ++v) m = std::min(m, r[v]);
  for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(pe[v] == m);
  CHECK_THROWS_AS(phi_infinity(g, ce.sigma, r, {}), Error);
}

TEST_CASE("unit-density phi_infinity is the distance") {
  // sigma = 1 everywhere including the source: use the synthetic density directly
  const auto g = build_sierpinski(3);
  const NodeFunction one = NodeFunction::constant(g, 1.0);
  const VertexId a[] = {9};
  const auto pinf = phi_infinity(g, one, NodeFunction::constant(g, 0.0), a);
  const auto d = distances_from(g, 9);
  for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(pinf[v] == doctest::Approx(d[v]).epsilon(1e-15));
}

TEST_CASE("two-source phi_infinity is the min of both shifted potentials") {
  const auto g = build_interval(200, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_profile(g));
  const auto crit = critical_data(g, H);
  REQUIRE(crit.aubry.size() == 2);
  std::vector<double> pm(g.vertex_count(), 10.0);
  pm[0] = 0.2;
  pm[200] = -0.1;
  const auto pinf = phi_infinity(g, crit.sigma, NodeFunction(g, pm), crit.aubry);
  const auto s0 = mane_potential(g, crit.sigma, 0);
  const auto s1 = mane_potential(g, crit.sigma, 200);
  for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(pinf[v] == std::min(s0[v] + 0.2, s1[v] - 0.1));
}

TEST_CASE("convergence report examples") {
  const auto g = build_interval(100, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_profile(g));
  const auto crit = critical_data(g, H);
  const auto st = stationary_solution(g, H);
  const auto exact = synthetic(st.v, st.c, 0.01, 30, [](std::size_t, VertexId) { return 0.0; });
  const auto r = convergence_report(exact, st.c, st.v, 1e-12, crit.aubry);
  for (const auto& [t, gap] : r.gap_series) CHECK(gap <= 1e-15);
  REQUIRE(r.t_star);
  CHECK(*r.t_star == 0.0);
  CHECK(r.aubry_monotone_ok);
  CHECK(r.final_gap == r.gap_series.back().second);
  CHECK(r.gap_series.size() == exact.times.size());

  // the stationary potential barely moves under the discrete flow
  const auto tr = solve(g, H, st.v, 2.0);
  const double tol = scheme_tolerance(g, tr.dt);
  const auto rs = convergence_report(tr, crit.c, st.v, tol, crit.aubry);
  for (const auto& [t, gap] : rs.gap_series) CHECK(gap <= tol);

  const auto gen = solve(g, H, NodeFunction::constant(g, 0.0), 3.0);
  const auto pm = phi_minus(gen, crit.c);
  const auto pinf = phi_infinity(g, crit.sigma, pm, crit.aubry);
  const double tg = scheme_tolerance(g, gen.dt);
  const auto rg = convergence_report(gen, crit.c, pinf, tg, crit.aubry);
  const std::size_t half = rg.gap_series.size() / 2;
  CHECK(rg.final_gap <= rg.gap_series[half].second + tg);
  // one stored step can raise the gap by at most spacing * |H(x, D-phi) - c|
  const auto res = stationary_residual(g, H, pinf, crit.c, crit.aubry);
  const double slack = gen.spacing() * std::max(res.max_sub_violation, res.max_super_violation) + 1e-12;
  CHECK(gap_nonincreasing_after_peak(rg, slack));
  MESSAGE("largest rise ", [&] {
    double m = 0.0;
    for (std::size_t k = 1; k < rg.gap_series.size(); ++k)
      m = std::max(m, rg.gap_series[k].second - rg.gap_series[k - 1].second);
    return m;
  }(), " against slack ", slack);
  CHECK(rg.aubry_slack == doctest::Approx(10.0 * gen.dt));
}

TEST_CASE("rising Aubry values are flagged") {
  const auto g = build_interval(20, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_profile(g));
  const auto crit = critical_data(g, H);
  const auto st = stationary_solution(g, H);
  const auto up = synthetic(st.v, st.c, 0.01, 10, [](std::size_t k, VertexId) { return 0.5 * k; });
  const auto r = convergence_report(up, st.c, st.v, 1e-9, crit.aubry);
  CHECK_FALSE(r.aubry_monotone_ok);
  CHECK(r.aubry_max_violation == doctest::Approx(0.5));
  CHECK((!r.t_star || *r.t_star == 0.0));
}

TEST_CASE("profile identities on the cosine instance") {
  const auto g = build_interval(200, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_profile(g));
  const auto crit = critical_data(g, H);
  const auto st = stationary_solution(g, H);
  std::vector<double> s(g.vertex_count());
  for (VertexId v = 0; v < s.size(); ++v) s[v] = 0.3 * std::sin(3.0 * M_PI * g.coords()[v].x);
  for (const auto& u0 : {NodeFunction::constant(g, 0.0), NodeFunction(g, s)}) {
    const auto tr = solve(g, H, u0, 3.0);
    const double tol = scheme_tolerance(g, tr.dt);
    const auto pm = phi_minus(tr, crit.c);
    const auto pinf = phi_infinity(g, crit.sigma, pm, crit.aubry);
    for (VertexId a : crit.aubry) CHECK(std::abs(pinf[a] - pm[a]) <= default_tol_cmp(pm));
    const double M = sup_distance(u0, st.v);
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
      for (VertexId x = 0; x < g.vertex_count(); ++x) {
        const double w = tr.snapshots[k][x] + crit.c * tr.times[k];
        CHECK(pm[x] <= w);
        CHECK(w >= st.v[x] - M - tol);
        CHECK(w <= st.v[x] + M + tol);
      }
    }
    const auto res = stationary_residual(g, H, pinf, crit.c, crit.aubry);
    CHECK(res.max_sub_violation <= tol);
    CHECK(res.max_super_violation <= tol);
    const auto rep = convergence_report(tr, crit.c, pinf, tol, crit.aubry);
    CHECK(rep.aubry_monotone_ok);
    CHECK(rep.final_gap <= tol);
    REQUIRE(rep.t_star);
    CHECK(*rep.t_star < 3.0);
  }
}

TEST_CASE("phi_minus keeps u0 where u + ct rises") {
  // u0 = 0 under |p| + cos: off the Aubry set u + ct increases from its start,
  // so phi_minus is u0 there and is not stationary
  const auto g = build_interval(100, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_profile(g));
  const auto crit = critical_data(g, H);
  const auto tr = solve(g, H, NodeFunction::constant(g, 0.0), 2.0);
  const auto pm = phi_minus(tr, crit.c);
  CHECK(pm[50] == 0.0);
  const auto res = stationary_residual(g, H, pm, crit.c, crit.aubry);
  CHECK(res.max_super_violation > 1.0);

  // started on a stationary potential it is stationary too
  const auto st = stationary_solution(g, H);
  const auto tr2 = solve(g, H, st.v, 2.0);
  const auto pm2 = phi_minus(tr2, crit.c);
  const auto res2 = stationary_residual(g, H, pm2, crit.c, crit.aubry);
  const double tol = scheme_tolerance(g, tr2.dt);
  CHECK(res2.max_sub_violation <= tol);
  CHECK(res2.max_super_violation <= tol);
}

TEST_CASE("constant shift of u0 shifts the profile") {
  const auto g = build_interval(100, 1.0);
  const auto H = Hamiltonian::power(g, 2.0, cos_profile(g));
  const auto crit = critical_data(g, H);
  std::vector<double> s(g.vertex_count());
  for (VertexId v = 0; v < s.size(); ++v) s[v] = 0.2 * std::sin(2.0 * M_PI * g.coords()[v].x);
  const NodeFunction u0(g, s);
  const auto base = phi_infinity(g, crit.sigma, phi_minus(solve(g, H, u0, 2.0), crit.c), crit.aubry);
  for (double k : {-3.0, 0.5, 7.25}) {
    const auto moved = phi_infinity(g, crit.sigma, phi_minus(solve(g, H, u0.shifted(k), 2.0), crit.c), crit.aubry);
    for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(std::abs(moved[v] - (base[v] + k)) <= 1e-12 * (1.0 + std::abs(k)));
  }
}

TEST_CASE("rescale check") {
  const auto g = build_interval(200, 1.0);
  const auto H = Hamiltonian::affine(g, 1.0, cos_profile(g));
  const auto crit = critical_data(g, H);
  const auto tr = solve(g, H, NodeFunction::constant(g, 0.0), 3.0);
  const double tol = scheme_tolerance(g, tr.dt);
  CHECK(rescale_check(g, tr, 1.0, H, crit.c) == trace_residual(g, tr, H, crit.c));
  // the explicit scheme satisfies its own discrete equation up to rounding
  CHECK(trace_residual(g, tr, H, crit.c) <= 1e-9);
  for (double lambda : {0.5, 2.0}) CHECK(rescale_check(g, tr, lambda, H, crit.c) <= tol);

  CHECK_THROWS_AS(rescale_check(g, tr, 0.0, H, crit.c), Error);
  CHECK_THROWS_AS(rescale_check(g, tr, -1.0, H, crit.c), Error);
  try {
    rescale_check(g, tr, 1e-9, H, crit.c);
    FAIL("expected a range error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::range);
  }

  // stationary trace: the time part vanishes and only the sub side remains
  const auto st = stationary_solution(g, H);
  const auto flat = synthetic(st.v, st.c, tr.dt, 40, [](std::size_t, VertexId) { return 0.0; });
  const auto res = stationary_residual(g, H, st.v, st.c);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const double r = rescale_check(g, flat, lambda, H, st.c);
    CHECK(r >= res.max_sub_violation - 1e-12);
    CHECK(r <= tol);
  }
}
